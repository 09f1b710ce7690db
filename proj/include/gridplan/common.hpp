#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gridplan {

// Error taxonomy shared across modules. Everything user-facing derives from
// Error so the CLI can map any failure to exit code 1 with a typed prefix.
struct Error : std::runtime_error {
  Error(std::string kind, const std::string& msg)
      : std::runtime_error(kind + ": " + msg), kind(std::move(kind)) {}
  std::string kind;
};

struct SchemaError : Error {
  explicit SchemaError(const std::string& m) : Error("SchemaError", m) {}
};
struct ReferenceError : Error {
  explicit ReferenceError(const std::string& m) : Error("ReferenceError", m) {}
};
struct CapacityError : Error {
  explicit CapacityError(const std::string& m) : Error("CapacityError", m) {}
};
struct OutOfBounds : Error {
  explicit OutOfBounds(const std::string& m) : Error("OutOfBounds", m) {}
};
struct CornerOutdoor : Error {
  explicit CornerOutdoor(const std::string& m) : Error("CornerOutdoor", m) {}
};
struct BuildError : Error {
  explicit BuildError(const std::string& m) : Error("BuildError", m) {}
};
struct SolverNotFound : Error {
  explicit SolverNotFound(const std::string& m) : Error("SolverNotFound", m) {}
};
struct SolverCrashed : Error {
  explicit SolverCrashed(const std::string& m) : Error("SolverCrashed", m) {}
};
struct ParseError : Error {
  explicit ParseError(const std::string& m) : Error("ParseError", m) {}
};
struct BudgetExceeded : Error {
  explicit BudgetExceeded(const std::string& m) : Error("BudgetExceeded", m) {}
};
struct InvalidModel : Error {
  explicit InvalidModel(const std::string& m) : Error("InvalidModel", m) {}
};
struct DegenerateGrid : Error {
  explicit DegenerateGrid(const std::string& m) : Error("DegenerateGrid", m) {}
};
struct NoCandidate : Error {
  explicit NoCandidate(const std::string& m) : Error("NoCandidate", m) {}
};
struct MissingRoom : Error {
  explicit MissingRoom(const std::string& m) : Error("MissingRoom", m) {}
};
struct ApiError : Error {
  explicit ApiError(const std::string& m) : Error("ApiError", m) {}
};
struct StageSchemaError : Error {
  explicit StageSchemaError(const std::string& m) : Error("StageSchemaError", m) {}
};
struct ConflictError : Error {
  explicit ConflictError(const std::string& m) : Error("ConflictError", m) {}
};

// splitmix64. Pinned here (instead of std::mt19937 + distributions) because
// std distribution output is not specified bit-for-bit across standard
// libraries, and golden tests require cross-platform stable draws.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ull;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n) by rejection, so no modulo bias.
  uint64_t below(uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below(0)");
    uint64_t threshold = (0ull - n) % n;
    for (;;) {
      uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

 private:
  uint64_t state_;
};

// FNV-1a, used for stable name-based colors and scene digests.
inline uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Number formatting for LP files and CSV: integers without a decimal point or
// exponent, everything else via %.12g. All model coefficients live well inside
// [1e-4, 1e12), so %.12g never falls back to exponent notation.
inline std::string format_number(double v) {
  long long as_int = static_cast<long long>(v);
  if (static_cast<double>(as_int) == v && v > -1e15 && v < 1e15) {
    return std::to_string(as_int);
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace gridplan
