#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace rsm::cli {

// key=value settings. Later sources override earlier ones:
// built-in defaults, then a --config file, then command-line flags.
class RunConfig {
 public:
  RunConfig();

  void merge_file(const std::string& path);
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string str(const std::string& key) const;
  double real(const std::string& key) const;
  long integer(const std::string& key) const;
  std::vector<int> int_list(const std::string& key) const;  // "a,b,c" or "lo:hi:step"
  std::vector<double> real_list(const std::string& key) const;

  // Error if a tolerance is not positive or precision < 64.
  void validate() const;
  const std::map<std::string, std::string>& values() const { return values_; }

  static const std::vector<std::string>& keys();

 private:
  std::map<std::string, std::string> values_;
};

// Entry point shared by the executable and the tests. Returns the exit
// status: 0 success, 1 error, 2 usage, 3 uncertified result.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rsm::cli
