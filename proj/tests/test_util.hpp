#ifndef RADLABEL_TEST_UTIL_HPP
#define RADLABEL_TEST_UTIL_HPP

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <string>
#include <vector>

#include "radlabel/corpus.hpp"
#include "radlabel/label_schema.hpp"
#include "radlabel/rng.hpp"

namespace test_util {

inline radlabel::LabelVector random_label_vector(radlabel::Rng& rng) {
  radlabel::LabelVector vec;
  for (const radlabel::Condition c : radlabel::all_conditions()) {
    const int n = radlabel::class_count(c);
    vec.set(c, static_cast<radlabel::LabelClass>(rng.uniform_below(n)));
  }
  return vec;
}

inline std::vector<radlabel::LabelVector> random_label_vectors(
    radlabel::Rng& rng, std::size_t n) {
  std::vector<radlabel::LabelVector> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_label_vector(rng));
  return out;
}

// Unique scratch directory under the build tree; removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("radlabel-test-" + tag + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::string str() const { return path_.string(); }
  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  std::filesystem::path path_;
};

}  // namespace test_util

#endif  // RADLABEL_TEST_UTIL_HPP
