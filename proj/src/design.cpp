#include "sdphi/design.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "sdphi/rational.hpp"

namespace sdphi {

namespace {
constexpr std::int64_t kMaxLevels = std::int64_t{1} << 20;
}

std::int64_t Design::levels() const { return ipow64(s, p); }

void Design::set(std::int64_t row, int col, std::int64_t v) {
  x[static_cast<std::size_t>(row) * m + col] = v;
  u_type_cache_.reset();
}

bool Design::is_u_type() const {
  if (!u_type_cache_) {
    const std::int64_t L = levels();
    bool ok = n % L == 0;
    if (ok) {
      const std::int64_t target = n / L;
      std::vector<std::int64_t> count(static_cast<std::size_t>(L));
      for (int k = 0; k < m && ok; ++k) {
        std::fill(count.begin(), count.end(), 0);
        for (std::int64_t i = 0; i < n; ++i) ++count[static_cast<std::size_t>(at(i, k))];
        for (std::int64_t lv = 0; lv < L && ok; ++lv) ok = count[static_cast<std::size_t>(lv)] == target;
      }
    }
    u_type_cache_ = ok;
  }
  return *u_type_cache_;
}

void Design::validate() const {
  if (n < 1) throw std::invalid_argument("design needs at least one run");
  if (m < 1) throw std::invalid_argument("design needs at least one column");
  if (s < 2) throw std::invalid_argument("design base must be at least 2");
  if (p < 1) throw std::invalid_argument("design depth must be positive");
  const std::int64_t L = levels();
  if (L > kMaxLevels) throw std::invalid_argument("level count exceeds 2^20");
  if (static_cast<std::int64_t>(x.size()) != n * m)
    throw std::invalid_argument("design entry count does not match n*m");
  for (std::int64_t v : x)
    if (v < 0 || v >= L)
      throw std::invalid_argument("design entry " + std::to_string(v) + " outside [0, " +
                                  std::to_string(L) + ")");
}

Design make_design(std::int64_t n, int m, std::int64_t s, int p, std::vector<std::int64_t> entries) {
  Design d;
  d.n = n;
  d.m = m;
  d.s = s;
  d.p = p;
  d.x = std::move(entries);
  d.validate();
  return d;
}

double embed_midpoint(std::int64_t x, std::int64_t levels) {
  return (2.0 * static_cast<double>(x) + 1.0) / (2.0 * static_cast<double>(levels));
}

DesignFile read_design(std::istream& in) {
  DesignFile out;
  std::string line;
  // Header: first non-empty, non-comment line.
  bool have_header = false;
  std::int64_t n = 0, s = 0;
  int m = 0, p = 0;
  std::vector<std::int64_t> entries;
  std::int64_t rows_read = 0;
  while (std::getline(in, line)) {
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      out.comments.push_back(line.substr(first));
      continue;
    }
    std::istringstream ls(line);
    if (!have_header) {
      if (!(ls >> n >> m >> s >> p)) throw std::runtime_error("bad design header: " + line);
      std::string extra;
      if (ls >> extra) throw std::runtime_error("trailing tokens in design header");
      have_header = true;
      entries.reserve(static_cast<std::size_t>(n) * m);
      continue;
    }
    if (rows_read == n) throw std::runtime_error("more data rows than the header announced");
    for (int k = 0; k < m; ++k) {
      std::int64_t v;
      if (!(ls >> v)) throw std::runtime_error("short design row: " + line);
      entries.push_back(v);
    }
    std::string extra;
    if (ls >> extra) throw std::runtime_error("trailing tokens in design row: " + line);
    ++rows_read;
  }
  if (!have_header) throw std::runtime_error("empty design file");
  if (rows_read != n) throw std::runtime_error("design file ended before all rows were read");
  out.design = make_design(n, m, s, p, std::move(entries));
  return out;
}

DesignFile read_design_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open design file: " + path);
  return read_design(in);
}

void write_design(std::ostream& out, const Design& d, const std::vector<std::string>& comments) {
  out << d.n << " " << d.m << " " << d.s << " " << d.p << "\n";
  for (const std::string& c : comments) out << c << "\n";
  for (std::int64_t i = 0; i < d.n; ++i) {
    for (int k = 0; k < d.m; ++k) {
      if (k) out << " ";
      out << d.at(i, k);
    }
    out << "\n";
  }
}

void write_design_file(const std::string& path, const Design& d,
                       const std::vector<std::string>& comments) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  write_design(out, d, comments);
}

}  // namespace sdphi
