#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace varlag {

// Flat "key = value" document: one pair per line, '#' starts a comment,
// blank lines ignored, list values comma-separated. Keys mirror CLI flags.
class KeyValueConfig {
  public:
    KeyValueConfig() = default;
    static KeyValueConfig parse(const std::string& text);
    static KeyValueConfig parse_file(const std::string& path);

    bool has(const std::string& key) const;
    std::optional<std::string> get(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<std::string> get_list(const std::string& key) const;

    void set(const std::string& key, const std::string& value);
    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

    std::string serialize() const;

  private:
    std::vector<std::pair<std::string, std::string>> entries_;  // insertion order
    std::map<std::string, std::string> index_;
};

}  // namespace varlag
