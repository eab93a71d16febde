#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sdphi {

/// An n x m array with entries in {0, ..., s^p - 1}, stored row major.
/// Entries are level labels whose base-s digits define the nested strata:
/// the leading digit selects one of s coarse slices, the first two digits
/// one of s^2 finer slices, and so on.
struct Design {
  std::int64_t n = 0;
  int m = 0;
  std::int64_t s = 2;
  int p = 1;
  std::vector<std::int64_t> x;

  std::int64_t levels() const;  // s^p
  std::int64_t at(std::int64_t row, int col) const { return x[static_cast<std::size_t>(row) * m + col]; }
  void set(std::int64_t row, int col, std::int64_t v);

  /// True when every column takes every level equally often (n/s^p times
  /// each). Computed once and cached; call set() to mutate so the cache
  /// stays honest.
  bool is_u_type() const;

  /// Validate header consistency and entry ranges; throws on violation.
  void validate() const;

 private:
  mutable std::optional<bool> u_type_cache_;
};

Design make_design(std::int64_t n, int m, std::int64_t s, int p, std::vector<std::int64_t> entries);

/// Fraction of the unit interval at which a level label is embedded:
/// the midpoint (2x + 1) / (2 * levels).
double embed_midpoint(std::int64_t x, std::int64_t levels);

/// A design file is plain text:
///
///   n m s p
///   # comment lines (kept verbatim on round trip)
///   x11 x12 ... x1m
///   ...
///
/// Comment lines may appear anywhere after the header.
struct DesignFile {
  Design design;
  std::vector<std::string> comments;
};

DesignFile read_design(std::istream& in);
DesignFile read_design_file(const std::string& path);
void write_design(std::ostream& out, const Design& d, const std::vector<std::string>& comments = {});
void write_design_file(const std::string& path, const Design& d,
                       const std::vector<std::string>& comments = {});

}  // namespace sdphi
