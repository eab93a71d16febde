// Command-line interface for the stratified-discrepancy design toolkit:
// evaluation, bounds, constructions, pattern analysis, counting checks,
// reference benchmarks, and stochastic search.
//
// Exit codes: 0 success, 1 failed check/benchmark, 2 usage or input errors.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "sdphi/construct.hpp"
#include "sdphi/design.hpp"
#include "sdphi/gf.hpp"
#include "sdphi/metrics.hpp"
#include "sdphi/patterns.hpp"
#include "sdphi/rational.hpp"
#include "sdphi/search.hpp"
#include "sdphi/tolerance.hpp"
#include "sdphi/weights.hpp"

namespace {

using json = nlohmann::json;
using namespace sdphi;

std::string fmt(double v, const char* spec = "%.12g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string fmt17(double v) { return fmt(v, "%.17g"); }

std::string yn(bool v) { return v ? "yes" : "no"; }

// ---------------------------------------------------------------------------
// eval

struct EvalOpts {
  std::string file;
  std::string weights = "constant";
  std::int64_t kernel_s = 0;  // 0: use the design's own base
  int kernel_p = 0;           // 0: derive the largest depth that fits
  bool verify = false;
  bool phi3 = false;
  bool json_out = false;
};

int run_eval(const EvalOpts& o) {
  const DesignFile df = read_design_file(o.file);
  const Design& D = df.design;
  if (D.m < 2)
    throw std::invalid_argument("the projection criterion needs at least two columns");

  const bool overridden = o.kernel_s != 0;
  std::int64_t s_eff = D.s;
  int p_eff = D.p;
  if (overridden) {
    s_eff = o.kernel_s;
    if (s_eff < 2) throw std::invalid_argument("kernel base must be at least 2");
    if (o.kernel_p > 0) {
      p_eff = o.kernel_p;
    } else {
      p_eff = 0;  // largest depth with s^p <= levels
      std::int64_t acc = 1;
      while (acc * s_eff <= D.levels()) {
        acc *= s_eff;
        ++p_eff;
      }
      if (p_eff == 0) throw std::invalid_argument("kernel base exceeds the level count");
    }
  }
  const Stratification st = Stratification::embedded(D.levels(), s_eff, p_eff);
  const WeightScheme w = materialize(parse_weight_spec(o.weights), s_eff, p_eff);

  const bool u_type = D.is_u_type();
  const double sd2_val = sd2(D, w, st);
  const PhiResult phi = phi_sd(D, w, st);
  const double g_d = distance_matrix(D, w, st).g_d;
  std::optional<std::string> g_d_exact;
  if (w.has_exact()) g_d_exact = scaled_distance_matrix(D, w, st).g_exact().str();

  std::optional<BoundsReport> bnd;
  if (st.native && D.n >= 2) {
    BoundsReport b = bounds(D.n, D.m, s_eff, p_eff, w);
    attainment(b, D, w, st);
    bnd = b;
  }
  std::optional<double> phi3_val;
  if (o.phi3) {
    if (D.m < 3)
      throw std::invalid_argument("the three-column criterion needs at least three columns");
    phi3_val = phi_sd3(D, w, st);
  }
  std::optional<double> phi_fast_val, phi_oracle_val;
  bool verify_ok = true;
  if (o.verify) {
    if (!st.native || !u_type)
      throw std::invalid_argument(
          "--verify compares both criterion paths, which needs a balanced design on native levels");
    phi_fast_val = phi_sd_fast(D, w);
    phi_oracle_val = phi_sd_oracle(D, w, st);
    verify_ok = tol::rel_equal(*phi_fast_val, *phi_oracle_val);
  }
  const char* path_name = phi.fast_path ? "closed-form" : "by-projection";

  if (o.json_out) {
    json j;
    j["file"] = o.file;
    j["n"] = D.n;
    j["m"] = D.m;
    j["s"] = D.s;
    j["p"] = D.p;
    j["levels"] = D.levels();
    if (overridden) {
      j["kernel_s"] = s_eff;
      j["kernel_p"] = p_eff;
    }
    j["weights"] = w.describe();
    j["u_type"] = u_type;
    j["sd2"] = sd2_val;
    j["phi"] = phi.value;
    j["phi_path"] = path_name;
    j["g_d"] = g_d;
    if (g_d_exact) j["g_d_exact"] = *g_d_exact;
    if (bnd) {
      j["g_lb"] = bnd->g_lb;
      j["g_ub"] = bnd->g_ub;
      j["phi_lb"] = bnd->phi_lb;
      j["phi_ub"] = bnd->phi_ub;
      j["d_bar"] = bnd->d_bar;
      j["gap_lb"] = phi.value - bnd->phi_lb;
      j["attained_lb"] = bnd->attained_lb;
      j["attained_ub"] = bnd->attained_ub;
    }
    if (phi3_val) j["phi3"] = *phi3_val;
    if (phi_fast_val) {
      j["phi_closed_form"] = *phi_fast_val;
      j["phi_by_projection"] = *phi_oracle_val;
      j["paths_agree"] = verify_ok;
    }
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "design: n=" << D.n << " m=" << D.m << " s=" << D.s << " p=" << D.p
              << " (levels=" << D.levels() << ")\n";
    if (overridden)
      std::cout << "kernel: s=" << s_eff << " p=" << p_eff << " (labels embedded at midpoints)\n";
    std::cout << "weights: " << w.describe() << "\n";
    std::cout << "balanced columns: " << yn(u_type) << "\n";
    std::cout << "sd2: " << fmt(sd2_val) << "\n";
    std::cout << "phi: " << fmt(phi.value) << "  (" << path_name << ")\n";
    std::cout << "g_d: " << fmt(g_d);
    if (g_d_exact) std::cout << "  (= " << *g_d_exact << ")";
    std::cout << "\n";
    if (bnd) {
      std::cout << "g bounds: [" << fmt(bnd->g_lb) << ", " << fmt(bnd->g_ub) << "]\n";
      std::cout << "phi bounds: [" << fmt(bnd->phi_lb) << ", " << fmt(bnd->phi_ub) << "]\n";
      std::cout << "d_bar: " << fmt(bnd->d_bar) << "\n";
      std::cout << "gap to lower bound: " << fmt(phi.value - bnd->phi_lb) << "\n";
      std::cout << "lower bound attained: " << yn(bnd->attained_lb) << "\n";
      std::cout << "upper bound attained: " << yn(bnd->attained_ub) << "\n";
    } else {
      std::cout << "bounds: not applicable (non-native stratification)\n";
    }
    if (phi3_val) std::cout << "phi3: " << fmt(*phi3_val) << "\n";
    if (phi_fast_val) {
      std::cout << "phi closed-form: " << fmt17(*phi_fast_val) << "\n";
      std::cout << "phi by-projection: " << fmt17(*phi_oracle_val) << "\n";
      std::cout << "paths agree: " << yn(verify_ok) << "\n";
    }
  }
  return verify_ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// construct

void emit_design(const Constructed& c, const std::string& out_path) {
  write_design_file(out_path, c.design, {c.provenance});
  const Design& d = c.design;
  std::cout << "wrote " << out_path << ": n=" << d.n << " m=" << d.m << " s=" << d.s
            << " p=" << d.p << " balanced=" << yn(d.is_u_type()) << "\n";
}

struct MultTableOpts {
  std::int64_t s = 3;
  int p = 2;
  int q = 0;  // 0: full depth
  bool half = false;
  std::string out;
};

int run_mult_table(const MultTableOpts& o) {
  if (o.half && o.q != 0)
    throw std::invalid_argument("--half keeps full depth; it cannot be combined with --q");
  Constructed c = o.half ? half_column_design(o.s, o.p)
                         : mult_table_design(o.s, o.p, o.q == 0 ? o.p : o.q);
  emit_design(c, o.out);
  return 0;
}

struct GhOpts {
  std::string in;
  std::int64_t s = 2;
  int q = 0;  // 0: full depth
  std::string out;
};

int run_gh(const GhOpts& o) {
  const GHMatrix H = read_gh_file(o.in);
  int p_full = 0;
  std::int64_t acc = 1;
  while (acc < H.q) {
    acc *= o.s;
    ++p_full;
  }
  if (acc != H.q || p_full < 1)
    throw std::invalid_argument("difference-matrix field order is not a power of the base s");
  Constructed c = gh_to_design(H, o.s, o.q == 0 ? p_full : o.q);
  emit_design(c, o.out);
  return 0;
}

struct RaoHammingOpts {
  std::int64_t s = 3;
  std::string out;
};

int run_rao_hamming(const RaoHammingOpts& o) {
  emit_design(rao_hamming_design(o.s), o.out);
  return 0;
}

struct JuxtaposeOpts {
  std::string first, second, out;
};

int run_juxtapose(const JuxtaposeOpts& o) {
  const DesignFile a = read_design_file(o.first);
  const DesignFile b = read_design_file(o.second);
  emit_design(juxtapose(a.design, b.design), o.out);
  return 0;
}

struct CollapseOpts {
  std::string file;
  int q = 1;
  std::string out;
};

int run_collapse(const CollapseOpts& o) {
  const DesignFile df = read_design_file(o.file);
  emit_design(collapse_design(df.design, o.q), o.out);
  return 0;
}

struct WorstCaseOpts {
  std::int64_t n = 0;
  int m = 0;
  std::int64_t s = 2;
  int p = 1;
  std::string out;
};

int run_worst_case(const WorstCaseOpts& o) {
  emit_design(worst_case_design(o.n, o.m, o.s, o.p), o.out);
  return 0;
}

// ---------------------------------------------------------------------------
// search

struct SearchOpts {
  std::int64_t n = 0;
  int m = 0;
  std::int64_t s = 2;
  int p = 1;
  std::string weights = "constant";
  std::int64_t iters = 20000;
  int restarts = 1;
  std::uint64_t seed = 0;
  std::string out;
};

int run_search(const SearchOpts& o) {
  const WeightScheme w = materialize(parse_weight_spec(o.weights), o.s, o.p);
  SearchConfig cfg;
  cfg.iterations = o.iters;
  cfg.restarts = o.restarts;
  cfg.seed = o.seed;
  const SearchResult result = minimize_phi_sd(o.n, o.m, o.s, o.p, w, cfg);
  std::ostringstream prov;
  prov << "# provenance: search n=" << o.n << " m=" << o.m << " s=" << o.s << " p=" << o.p
       << " weights=" << w.describe() << " iters=" << o.iters << " restarts=" << o.restarts
       << " seed=" << o.seed;
  std::ostringstream prov2;
  prov2 << "# provenance: search best_phi=" << fmt17(result.best_phi)
        << " phi_lb=" << fmt17(result.phi_lb);
  write_design_file(o.out, result.best, {prov.str(), prov2.str()});
  std::cout << "wrote " << o.out << "\n";
  std::cout << "best phi: " << fmt17(result.best_phi) << "\n";
  std::cout << "phi lower bound: " << fmt17(result.phi_lb) << "\n";
  std::cout << "gap: " << fmt17(result.gap) << "\n";
  std::cout << "restart bests:";
  for (double v : result.restart_best) std::cout << " " << fmt(v);
  std::cout << "\n";
  std::cout << "proposals: " << result.iterations_run << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// pattern

struct PatternOpts {
  std::string file;
  int jmax = -1;  // -1: full spectrum
  double y = 0;   // 0: no enumerator report
  bool json_out = false;
};

int run_pattern(const PatternOpts& o) {
  const DesignFile df = read_design_file(o.file);
  const Design& D = df.design;
  PatternSpectrum ps =
      o.jmax >= 0 ? space_filling_pattern_partial(D, o.jmax) : space_filling_pattern(D);
  std::optional<EnumeratorReport> rep;
  std::optional<EnumeratorIdentity> ident;
  if (o.y != 0) {
    rep = enumerators(D, o.y);
    if (o.y > 0 && o.y < 1 && D.m >= 2) ident = check_enumerator_identity(D, o.y);
  }
  if (o.json_out) {
    json j;
    j["n"] = D.n;
    j["m"] = D.m;
    j["s"] = D.s;
    j["p"] = D.p;
    j["upto"] = ps.upto;
    j["full"] = o.jmax < 0;
    std::vector<double> s_j(ps.s_j.begin(), ps.s_j.begin() + ps.upto + 1);
    j["s_j"] = s_j;
    j["total"] = ps.total();
    if (rep) {
      j["y"] = rep->y;
      if (rep->whole) j["enumerator_whole"] = *rep->whole;
      j["enumerator_pairwise"] = rep->pairwise;
      j["sbar1"] = rep->sbar1;
      j["sbar2"] = rep->sbar2;
      j["sbar3"] = rep->sbar3;
    }
    if (ident) {
      j["phi_via_enumerator"] = ident->phi_via_enumerator;
      j["phi_via_kernel"] = ident->phi_via_kernel;
      j["identity_gap"] = ident->difference;
    }
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "design: n=" << D.n << " m=" << D.m << " s=" << D.s << " p=" << D.p << "\n";
    std::cout << (o.jmax >= 0 ? "truncated spectrum" : "full spectrum") << " (weights 0.."
              << ps.upto << "):\n";
    for (int jw = 0; jw <= ps.upto; ++jw)
      std::cout << "  S_" << jw << " = " << fmt(ps.s_j[static_cast<std::size_t>(jw)]) << "\n";
    std::cout << "mass in range: " << fmt(ps.total()) << "\n";
    if (rep) {
      std::cout << "enumerators at y=" << fmt(rep->y) << ":\n";
      if (rep->whole) std::cout << "  whole-design: " << fmt(*rep->whole) << "\n";
      std::cout << "  pairwise: " << fmt(rep->pairwise) << "\n";
      std::cout << "  sbar1=" << fmt(rep->sbar1) << " sbar2=" << fmt(rep->sbar2)
                << " sbar3=" << fmt(rep->sbar3) << "\n";
    }
    if (ident) {
      std::cout << "phi via enumerator: " << fmt17(ident->phi_via_enumerator) << "\n";
      std::cout << "phi via kernel: " << fmt17(ident->phi_via_kernel) << "\n";
      std::cout << "identity gap: " << fmt(ident->difference) << "\n";
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// check

struct CheckOpts {
  std::string file;
  int t = 2;
  bool json_out = false;
};

json strength_witness_json(const StrengthWitness& w) {
  json jw;
  jw["reason"] = w.reason;
  if (!w.columns.empty()) jw["columns"] = w.columns;
  if (!w.resolutions.empty()) jw["resolutions"] = w.resolutions;
  if (!w.cell.empty()) jw["cell"] = w.cell;
  jw["count"] = w.count;
  jw["expected"] = w.expected;
  return jw;
}

int report_strength(const char* name, const StrengthCheck& chk, bool json_out) {
  if (json_out) {
    json j;
    j["check"] = name;
    j["t"] = chk.t;
    j["pass"] = chk.ok;
    if (chk.witness) j["witness"] = strength_witness_json(*chk.witness);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << name << " (t=" << chk.t << "): " << (chk.ok ? "pass" : "FAIL") << "\n";
    if (chk.witness) {
      const StrengthWitness& w = *chk.witness;
      std::cout << "  " << w.reason;
      if (!w.columns.empty()) {
        std::cout << "; columns";
        for (int c : w.columns) std::cout << " " << c + 1;
        std::cout << "; resolutions";
        for (int r : w.resolutions) std::cout << " " << r;
        std::cout << "; cell";
        for (std::int64_t v : w.cell) std::cout << " " << v;
      }
      std::cout << "; count " << w.count << ", expected " << w.expected << "\n";
    }
  }
  return chk.ok ? 0 : 1;
}

int run_check_dtave(const CheckOpts& o) {
  const DesignFile df = read_design_file(o.file);
  const BalanceReport rep = verify_balance(df.design);
  if (o.json_out) {
    json j;
    j["check"] = "dtave";
    j["pass"] = rep.ok;
    j["targets_integral"] = rep.targets_integral;
    std::vector<std::string> targets;
    for (const Rational& r : rep.targets) targets.push_back(r.str());
    j["targets"] = targets;
    if (rep.witness) {
      json jw;
      jw["a"] = rep.witness->a + 1;
      jw["b"] = rep.witness->b + 1;
      jw["i"] = rep.witness->i;
      jw["count"] = rep.witness->count;
      jw["target"] = int128_to_string(rep.witness->target_num) + "/" +
                     int128_to_string(rep.witness->target_den);
      j["witness"] = jw;
    }
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "balance audit: " << (rep.ok ? "pass" : "FAIL") << "\n";
    std::cout << "targets integral: " << yn(rep.targets_integral) << "\n";
    if (rep.witness)
      std::cout << "  runs (" << rep.witness->a + 1 << "," << rep.witness->b + 1 << ") agree "
                << rep.witness->count << " times at resolution " << rep.witness->i << ", target "
                << int128_to_string(rep.witness->target_num) << "/"
                << int128_to_string(rep.witness->target_den) << "\n";
  }
  return rep.ok ? 0 : 1;
}

int run_check_gsoa(const CheckOpts& o) {
  const DesignFile df = read_design_file(o.file);
  return report_strength("strength", check_gsoa_strength(df.design, o.t), o.json_out);
}

int run_check_soa2plus(const CheckOpts& o) {
  const DesignFile df = read_design_file(o.file);
  return report_strength("2plus", check_soa_2plus(df.design), o.json_out);
}

// ---------------------------------------------------------------------------
// bench

struct BenchTableOpts {
  std::string weights = "constant";
};

struct ReferenceRow {
  const char* label;
  double sd2, phi, phi_lb, phi_ub, g_d, g_lb, g_ub;
  const char* g_d_exact;
  const char* g_ub_exact;
};

int run_bench_table1(const BenchTableOpts& o) {
  // Published reference values (rounded to the printed precision).
  constexpr double kTol = 5e-7;
  const ReferenceRow rows[2] = {
      {"full-table (9,8,3^2)", 1.148028, 0.010234, 0.010234, 0.031398, 600.888889, 600.888889,
       696.888889, "5408/9", "6272/9"},
      {"half-table (9,4,3^2)", 0.075833, 0.006706, 0.006706, 0.031398, 150.222222, 150.222222,
       174.222222, "1352/9", "1568/9"},
  };
  const Constructed designs[2] = {mult_table_design(3, 2, 2), half_column_design(3, 2)};
  const WeightSpec spec = parse_weight_spec(o.weights);
  bool all_pass = true;
  auto line = [&](const char* label, const char* what, double got, double want) {
    const bool pass = std::fabs(got - want) <= kTol;
    all_pass = all_pass && pass;
    std::cout << label << " " << what << ": " << fmt(got) << " (reference " << fmt(want) << ") "
              << (pass ? "PASS" : "FAIL") << "\n";
  };
  for (int i = 0; i < 2; ++i) {
    const Design& D = designs[i].design;
    const ReferenceRow& ref = rows[i];
    const WeightScheme w = materialize(spec, D.s, D.p);
    const double sd2_val = sd2(D, w);
    const double phi = phi_sd_fast(D, w);
    const BoundsReport bnd = bounds(D.n, D.m, D.s, D.p, w);
    const double g_d = distance_matrix(D, w).g_d;
    line(ref.label, "sd2", sd2_val, ref.sd2);
    line(ref.label, "phi", phi, ref.phi);
    line(ref.label, "phi_lb", bnd.phi_lb, ref.phi_lb);
    line(ref.label, "phi_ub", bnd.phi_ub, ref.phi_ub);
    line(ref.label, "g_d", g_d, ref.g_d);
    line(ref.label, "g_lb", bnd.g_lb, ref.g_lb);
    line(ref.label, "g_ub", bnd.g_ub, ref.g_ub);
    if (w.has_exact()) {
      const Rational g_exact = scaled_distance_matrix(D, w).g_exact();
      const BoundsExact be = bounds_exact(D.n, D.m, D.s, D.p, w);
      const bool g_pass = g_exact.str() == ref.g_d_exact;
      const bool ub_pass = be.g_ub.str() == ref.g_ub_exact;
      all_pass = all_pass && g_pass && ub_pass;
      std::cout << ref.label << " g_d exact: " << g_exact.str() << " (reference " << ref.g_d_exact
                << ") " << (g_pass ? "PASS" : "FAIL") << "\n";
      std::cout << ref.label << " g_ub exact: " << be.g_ub.str() << " (reference "
                << ref.g_ub_exact << ") " << (ub_pass ? "PASS" : "FAIL") << "\n";
    }
  }
  std::cout << (all_pass ? "benchmark: PASS" : "benchmark: FAIL") << "\n";
  return all_pass ? 0 : 1;
}

struct BenchRandomOpts {
  std::int64_t n = 9;
  int m = 8;
  std::int64_t s = 3;
  int p = 2;
  int count = 100;
  std::uint64_t seed = 0;
  std::string weights = "constant";
  bool json_out = false;
};

int run_bench_random(const BenchRandomOpts& o) {
  if (o.count < 1) throw std::invalid_argument("replicate count must be positive");
  const WeightScheme w = materialize(parse_weight_spec(o.weights), o.s, o.p);
  std::uint64_t state = o.seed;
  double sum = 0, sumsq = 0;
  for (int i = 0; i < o.count; ++i) {
    const Design D = random_u_type(o.n, o.m, o.s, o.p, derive_seed(state));
    const double phi = phi_sd_fast(D, w);
    sum += phi;
    sumsq += phi * phi;
  }
  const double mean = sum / o.count;
  const double var = o.count > 1 ? (sumsq - sum * sum / o.count) / (o.count - 1) : 0.0;
  const double sd = std::sqrt(std::max(0.0, var));
  if (o.json_out) {
    json j;
    j["n"] = o.n;
    j["m"] = o.m;
    j["s"] = o.s;
    j["p"] = o.p;
    j["count"] = o.count;
    j["seed"] = o.seed;
    j["weights"] = w.describe();
    j["mean_phi"] = mean;
    j["sd_phi"] = sd;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "random balanced designs: n=" << o.n << " m=" << o.m << " s=" << o.s
              << " p=" << o.p << " count=" << o.count << " seed=" << o.seed << "\n";
    std::cout << "mean phi: " << fmt17(mean) << "\n";
    std::cout << "sd phi: " << fmt17(sd) << (o.count > 1 ? "" : " (single replicate)") << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// distances

struct DistancesOpts {
  std::string file;
  std::string weights = "constant";
  std::string out;
};

int run_distances(const DistancesOpts& o) {
  const DesignFile df = read_design_file(o.file);
  const Design& D = df.design;
  const WeightScheme w = materialize(parse_weight_spec(o.weights), D.s, D.p);
  std::ofstream out(o.out);
  if (!out) throw std::runtime_error("cannot open output file: " + o.out);
  write_distance_csv(out, D, w);
  const DistanceDistribution dist = distance_distribution(D, w);
  std::cout << "wrote " << o.out << ": " << dist.pair_count << " pairs, "
            << dist.values.size() << " distinct values\n";
  if (dist.pair_count > 0)
    std::cout << "min " << fmt(dist.min) << ", median " << fmt(dist.median) << ", mean "
              << fmt(dist.mean) << ", max " << fmt(dist.max) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stratified-discrepancy design toolkit"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "worker-thread cap (results are identical for any value)")
      ->check(CLI::PositiveNumber);

  std::function<int()> action;

  auto eval_opts = std::make_shared<EvalOpts>();
  auto* eval = app.add_subcommand("eval", "evaluate a design file");
  eval->add_option("file", eval_opts->file, "design file")->required();
  eval->add_option("--weights", eval_opts->weights, "constant | exp:<y> | enum:<y> | custom:<w0,...,wp>");
  eval->add_option("--kernel-s", eval_opts->kernel_s, "evaluate under this kernel base instead of the design's own");
  eval->add_option("--kernel-p", eval_opts->kernel_p, "kernel depth (default: largest that fits the level count)");
  eval->add_flag("--verify", eval_opts->verify, "compute the criterion by both paths and compare");
  eval->add_flag("--phi3", eval_opts->phi3, "also average over three-column projections");
  eval->add_flag("--json", eval_opts->json_out, "machine-readable output");
  eval->callback([&action, eval_opts] { action = [eval_opts] { return run_eval(*eval_opts); }; });

  auto* construct = app.add_subcommand("construct", "generate reference designs");
  construct->require_subcommand(1);

  auto mt_opts = std::make_shared<MultTableOpts>();
  auto* mt = construct->add_subcommand("mult-table", "field multiplication-table design");
  mt->add_option("--s", mt_opts->s, "prime base")->required();
  mt->add_option("--p", mt_opts->p, "depth (field order s^p)")->required();
  mt->add_option("--q", mt_opts->q, "collapse entries to q leading digits (default: p)");
  mt->add_flag("--half", mt_opts->half, "keep one column per sign pair (odd s)");
  mt->add_option("--out", mt_opts->out, "output design file")->required();
  mt->callback([&action, mt_opts] { action = [mt_opts] { return run_mult_table(*mt_opts); }; });

  auto gh_opts = std::make_shared<GhOpts>();
  auto* gh = construct->add_subcommand("gh", "design from a difference matrix file");
  gh->add_option("--in", gh_opts->in, "difference matrix file (header: n q)")->required();
  gh->add_option("--s", gh_opts->s, "stratification base (field order must be s^p)")->required();
  gh->add_option("--q", gh_opts->q, "collapse entries to q leading digits (default: full depth)");
  gh->add_option("--out", gh_opts->out, "output design file")->required();
  gh->callback([&action, gh_opts] { action = [gh_opts] { return run_gh(*gh_opts); }; });

  auto rh_opts = std::make_shared<RaoHammingOpts>();
  auto* rh = construct->add_subcommand("rao-hamming", "paired two-factor orthogonal array design");
  rh->add_option("--s", rh_opts->s, "prime-power base <= 16")->required();
  rh->add_option("--out", rh_opts->out, "output design file")->required();
  rh->callback([&action, rh_opts] { action = [rh_opts] { return run_rao_hamming(*rh_opts); }; });

  auto jux_opts = std::make_shared<JuxtaposeOpts>();
  auto* jux = construct->add_subcommand("juxtapose", "concatenate two balanced designs column-wise");
  jux->add_option("first", jux_opts->first, "first design file")->required();
  jux->add_option("second", jux_opts->second, "second design file")->required();
  jux->add_option("--out", jux_opts->out, "output design file")->required();
  jux->callback([&action, jux_opts] { action = [jux_opts] { return run_juxtapose(*jux_opts); }; });

  auto col_opts = std::make_shared<CollapseOpts>();
  auto* col = construct->add_subcommand("collapse", "truncate entries to coarser levels");
  col->add_option("file", col_opts->file, "design file")->required();
  col->add_option("--q", col_opts->q, "target depth")->required();
  col->add_option("--out", col_opts->out, "output design file")->required();
  col->callback([&action, col_opts] { action = [col_opts] { return run_collapse(*col_opts); }; });

  auto wc_opts = std::make_shared<WorstCaseOpts>();
  auto* wc = construct->add_subcommand("worst-case", "identical-columns energy maximizer");
  wc->add_option("--n", wc_opts->n, "runs (multiple of s^p)")->required();
  wc->add_option("--m", wc_opts->m, "columns")->required();
  wc->add_option("--s", wc_opts->s, "base")->required();
  wc->add_option("--p", wc_opts->p, "depth")->required();
  wc->add_option("--out", wc_opts->out, "output design file")->required();
  wc->callback([&action, wc_opts] { action = [wc_opts] { return run_worst_case(*wc_opts); }; });

  auto search_opts = std::make_shared<SearchOpts>();
  auto* search = app.add_subcommand("search", "threshold-accepting criterion minimization");
  search->add_option("--n", search_opts->n, "runs (multiple of s^p)")->required();
  search->add_option("--m", search_opts->m, "columns")->required();
  search->add_option("--s", search_opts->s, "base")->required();
  search->add_option("--p", search_opts->p, "depth")->required();
  search->add_option("--weights", search_opts->weights, "weight scheme");
  search->add_option("--iters", search_opts->iters, "proposals per restart");
  search->add_option("--restarts", search_opts->restarts, "independent restarts");
  search->add_option("--seed", search_opts->seed, "random seed");
  search->add_option("--out", search_opts->out, "output design file")->required();
  search->callback(
      [&action, search_opts] { action = [search_opts] { return run_search(*search_opts); }; });

  auto pattern_opts = std::make_shared<PatternOpts>();
  auto* pattern = app.add_subcommand("pattern", "character-sum spectrum of a design");
  pattern->add_option("file", pattern_opts->file, "design file")->required();
  pattern->add_option("--jmax", pattern_opts->jmax, "truncate enumeration at this weight");
  pattern->add_option("--y", pattern_opts->y, "also report enumerator values at this argument");
  pattern->add_flag("--json", pattern_opts->json_out, "machine-readable output");
  pattern->callback(
      [&action, pattern_opts] { action = [pattern_opts] { return run_pattern(*pattern_opts); }; });

  auto* check = app.add_subcommand("check", "counting audits");
  check->require_subcommand(1);

  auto dtave_opts = std::make_shared<CheckOpts>();
  auto* dtave = check->add_subcommand("dtave", "pairwise balance audit");
  dtave->add_option("file", dtave_opts->file, "design file")->required();
  dtave->add_flag("--json", dtave_opts->json_out, "machine-readable output");
  dtave->callback(
      [&action, dtave_opts] { action = [dtave_opts] { return run_check_dtave(*dtave_opts); }; });

  auto gsoa_opts = std::make_shared<CheckOpts>();
  auto* gsoa = check->add_subcommand("gsoa", "stratification strength audit");
  gsoa->add_option("file", gsoa_opts->file, "design file")->required();
  gsoa->add_option("--t", gsoa_opts->t, "strength to verify")->required();
  gsoa->add_flag("--json", gsoa_opts->json_out, "machine-readable output");
  gsoa->callback(
      [&action, gsoa_opts] { action = [gsoa_opts] { return run_check_gsoa(*gsoa_opts); }; });

  auto soa_opts = std::make_shared<CheckOpts>();
  auto* soa = check->add_subcommand("soa2plus", "full-by-coarse pair collapse audit");
  soa->add_option("file", soa_opts->file, "design file")->required();
  soa->add_flag("--json", soa_opts->json_out, "machine-readable output");
  soa->callback(
      [&action, soa_opts] { action = [soa_opts] { return run_check_soa2plus(*soa_opts); }; });

  auto* bench = app.add_subcommand("bench", "reference and baseline benchmarks");
  bench->require_subcommand(1);

  auto bt_opts = std::make_shared<BenchTableOpts>();
  auto* bt = bench->add_subcommand("table1", "reproduce the published reference values");
  bt->add_option("--weights", bt_opts->weights, "weight scheme (non-default values are a negative control)");
  bt->callback([&action, bt_opts] { action = [bt_opts] { return run_bench_table1(*bt_opts); }; });

  auto br_opts = std::make_shared<BenchRandomOpts>();
  auto* br = bench->add_subcommand("random", "criterion statistics over random balanced designs");
  br->add_option("--n", br_opts->n, "runs")->required();
  br->add_option("--m", br_opts->m, "columns")->required();
  br->add_option("--s", br_opts->s, "base")->required();
  br->add_option("--p", br_opts->p, "depth")->required();
  br->add_option("--count", br_opts->count, "number of replicates");
  br->add_option("--seed", br_opts->seed, "random seed");
  br->add_option("--weights", br_opts->weights, "weight scheme");
  br->add_flag("--json", br_opts->json_out, "machine-readable output");
  br->callback([&action, br_opts] { action = [br_opts] { return run_bench_random(*br_opts); }; });

  auto dist_opts = std::make_shared<DistancesOpts>();
  auto* dist = app.add_subcommand("distances", "export the pair-distance table as CSV");
  dist->add_option("file", dist_opts->file, "design file")->required();
  dist->add_option("--weights", dist_opts->weights, "weight scheme");
  dist->add_option("--out", dist_opts->out, "output CSV file")->required();
  dist->callback(
      [&action, dist_opts] { action = [dist_opts] { return run_distances(*dist_opts); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (!action) {
    std::cerr << app.help() << "\n";
    return 2;
  }
  try {
    return action();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
