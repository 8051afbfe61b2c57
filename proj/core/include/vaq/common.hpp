#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace vaq {

inline constexpr const char *kToolVersion = "0.1.0";

// Exit-code contract shared with the CLI: 2 usage, 3 data/config, 4 internal.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InternalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// 64-bit FNV-1a. Used for manifest hashes, plan hashes and probe-cache keys.
class Fnv1a {
 public:
  void update(const void *data, std::size_t len) {
    const auto *p = static_cast<const unsigned char *>(data);
    for (std::size_t i = 0; i < len; ++i) {
      state_ ^= p[i];
      state_ *= 0x100000001b3ULL;
    }
  }

  void update(std::string_view s) { update(s.data(), s.size()); }

  template <typename T>
  void update_pod(const T &v) {
    static_assert(std::is_trivially_copyable_v<T>);
    update(&v, sizeof(v));
  }

  std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::uint64_t fnv1a(std::string_view s) {
  Fnv1a h;
  h.update(s);
  return h.digest();
}

inline std::string hex64(std::uint64_t v) {
  static const char *digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

}  // namespace vaq
