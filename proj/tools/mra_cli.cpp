// Command-line harness around the approximation library: synthetic input
// generation, single approximation runs, method sweeps, inequality checks,
// and Haar truncation studies. All output is CSV with '#'-prefixed header
// lines echoing the configuration, so identical invocations produce
// identical files.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mra/attention.hpp"
#include "mra/baselines.hpp"
#include "mra/bounds.hpp"
#include "mra/generators.hpp"
#include "mra/haar.hpp"
#include "mra/matvec.hpp"
#include "mra/plan.hpp"
#include "mra/pyramid.hpp"
#include "mra/tensor_io.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string join(const std::vector<std::size_t>& values, char sep) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(values[i]);
  }
  return out;
}

/// Output sink: path or stdout when the path is empty or "-".
struct Sink {
  std::ofstream file;
  std::ostream* out = &std::cout;

  explicit Sink(const std::string& path) {
    if (!path.empty() && path != "-") {
      file.open(path);
      if (!file) throw std::runtime_error("cannot open output file: " + path);
      out = &file;
    }
  }
  std::ostream& os() { return *out; }
};

struct InputFlags {
  std::string q_path, k_path, v_path;
  std::string kind = "gaussian";
  std::size_t n = 0;
  std::size_t d = 0;
  std::uint64_t seed = 0;
  double sigma = 1.0;
  std::size_t clusters = 4;
  double tau = 0.1;
  double gain = 1.0;

  void add_file_options(CLI::App* app) {
    app->add_option("--q", q_path, "query matrix path (.mrt or .csv)");
    app->add_option("--k", k_path, "key matrix path");
    app->add_option("--v", v_path, "value matrix path");
  }
  void add_generator_options(CLI::App* app) {
    app->add_option("--kind", kind, "generator kind")
        ->check(CLI::IsMember({"gaussian", "clustered", "peaked"}));
    app->add_option("--n", n, "sequence length");
    app->add_option("--d", d, "head dimension");
    app->add_option("--seed", seed, "generator seed");
    app->add_option("--sigma", sigma, "gaussian entry stddev");
    app->add_option("--clusters", clusters, "cluster count (clustered kind)");
    app->add_option("--tau", tau, "within-cluster noise stddev");
    app->add_option("--gain", gain, "logit gain (peaked kind)");
  }

  mra::GeneratorSpec generator_spec() const {
    mra::GeneratorSpec gs;
    if (kind == "gaussian") gs.kind = mra::GeneratorKind::gaussian;
    else if (kind == "clustered") gs.kind = mra::GeneratorKind::clustered;
    else gs.kind = mra::GeneratorKind::peaked;
    gs.n = n;
    gs.d = d;
    gs.seed = seed;
    gs.sigma = sigma;
    gs.clusters = clusters;
    gs.tau = tau;
    gs.gain = gain;
    return gs;
  }

  mra::GeneratedInputs load() const {
    if (!q_path.empty() || !k_path.empty() || !v_path.empty()) {
      if (q_path.empty() || k_path.empty() || v_path.empty())
        throw std::runtime_error("--q, --k, --v must be given together");
      return {mra::read_tensor(q_path), mra::read_tensor(k_path), mra::read_tensor(v_path)};
    }
    if (n == 0 || d == 0)
      throw std::runtime_error("either --q/--k/--v paths or --kind/--n/--d generator flags");
    return mra::generate(generator_spec());
  }

  std::string describe() const {
    if (!q_path.empty()) return "files q=" + q_path + " k=" + k_path + " v=" + v_path;
    std::ostringstream s;
    s << "generator kind=" << kind << " n=" << n << " d=" << d << " seed=" << seed
      << " sigma=" << sigma << " clusters=" << clusters << " tau=" << tau << " gain=" << gain;
    return s.str();
  }
};

struct ScheduleFlags {
  std::vector<std::size_t> scales{32, 1};
  std::vector<std::size_t> budgets{64};
  std::string variant = "full";
  double logit_scale = 0.0;  // 0 = auto 1/sqrt(d)
  double logit_bias = 0.0;

  void add_options(CLI::App* app) {
    app->add_option("--scales", scales, "descending dyadic scales, e.g. 32,1")->delimiter(',');
    app->add_option("--budgets", budgets, "per-stage refinement budgets")->delimiter(',');
    app->add_option("--variant", variant, "full | sparse-only")
        ->check(CLI::IsMember({"full", "sparse-only"}));
    app->add_option("--logit-scale", logit_scale, "logit scale (0 = 1/sqrt(d))");
    app->add_option("--logit-bias", logit_bias, "additive logit shift");
  }

  mra::ResolutionSchedule schedule() const {
    mra::ResolutionSchedule s;
    s.scales = scales;
    s.budgets = budgets;
    return s;
  }
  mra::PlanVariant plan_variant() const {
    return variant == "full" ? mra::PlanVariant::full : mra::PlanVariant::sparse_only;
  }
  double effective_scale(std::size_t d) const {
    return logit_scale != 0.0 ? logit_scale : 1.0 / std::sqrt(static_cast<double>(d));
  }
};

void write_header(std::ostream& os, const std::string& subcommand, const std::string& config) {
  os << "# mra " << kVersion << " " << subcommand << "\n";
  os << "# config: " << config << "\n";
  os << "# workload matching: m1 blocks of b^2 entries ~ sparse k = m1*b^2 entries"
     << " ~ svd rank = ceil(m1*b^2/(2n)) (entry-count parity, not runtime parity)\n";
}

/// Predicted pooled-logit evaluation count, replicating budget clamping:
/// the coarse stage evaluates (n/s0)^2 logits, and each refinement stage
/// evaluates (s_prev/s_next)^2 children per refined block, where the pool of
/// refinable blocks is the set of children created by the previous stage.
std::size_t predicted_mu_evals(std::size_t n, const std::vector<std::size_t>& scales,
                               const std::vector<std::size_t>& budgets) {
  std::size_t pool = (n / scales[0]) * (n / scales[0]);
  std::size_t total = pool;
  for (std::size_t i = 0; i + 1 < scales.size(); ++i) {
    const std::size_t m = std::min(budgets[i], pool);
    const std::size_t ratio = scales[i] / scales[i + 1];
    const std::size_t children = m * ratio * ratio;
    total += children;
    pool = children;
  }
  return total;
}

/// Row-normalizes an unnormalized attention matrix and applies it to V.
/// Rows whose sums vanish are zero-filled, mirroring the sparse variants.
mra::DenseMatrix normalize_and_apply(const mra::DenseMatrix& A, const mra::DenseMatrix& V) {
  mra::DenseMatrix Z(A.rows, V.cols, mra::Dtype::f64);
  for (std::size_t i = 0; i < A.rows; ++i) {
    double rs = 0.0;
    for (std::size_t j = 0; j < A.cols; ++j) rs += A.at(i, j);
    if (std::abs(rs) < mra::kRowSumGuard) continue;
    for (std::size_t k = 0; k < V.cols; ++k) {
      double acc = 0.0;
      for (std::size_t j = 0; j < A.cols; ++j) acc += A.at(i, j) * V.at(j, k);
      Z.at(i, k) = acc / rs;
    }
  }
  return Z;
}

int cmd_gen(const InputFlags& in, const std::string& out_prefix, const std::string& dtype) {
  if (in.n == 0 || in.d == 0) throw std::runtime_error("gen requires --n and --d");
  mra::GeneratedInputs gi = mra::generate(in.generator_spec());
  const mra::Dtype dt = dtype == "f32" ? mra::Dtype::f32 : mra::Dtype::f64;
  gi.Q.dtype = gi.K.dtype = gi.V.dtype = dt;
  mra::write_tensor(gi.Q, out_prefix + "q.mrt");
  mra::write_tensor(gi.K, out_prefix + "k.mrt");
  mra::write_tensor(gi.V, out_prefix + "v.mrt");
  std::cout << "# mra " << kVersion << " gen\n# config: " << in.describe()
            << " dtype=" << dtype << "\n";
  std::cout << "file,rows,cols\n";
  std::cout << out_prefix << "q.mrt," << gi.Q.rows << "," << gi.Q.cols << "\n";
  std::cout << out_prefix << "k.mrt," << gi.K.rows << "," << gi.K.cols << "\n";
  std::cout << out_prefix << "v.mrt," << gi.V.rows << "," << gi.V.cols << "\n";
  return 0;
}

int cmd_approx(const InputFlags& in, const ScheduleFlags& sf, const std::string& out_path,
               bool check_dense) {
  mra::GeneratedInputs gi = in.load();
  const std::size_t n = gi.Q.rows;
  const std::size_t d = gi.Q.cols;
  mra::AttentionInputs inputs{gi.Q, gi.K, gi.V, sf.effective_scale(d), sf.logit_bias};

  const auto start = std::chrono::steady_clock::now();
  mra::ApproxOutput approx = mra::approx_attention(inputs, sf.schedule(), sf.plan_variant());
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  double rel = std::nan("");
  if (check_dense && n <= mra::kDefaultDenseCap) {
    mra::ExactAttentionOutput exact = mra::exact_attention(inputs);
    rel = mra::relative_error(approx.Z_hat, exact.Z);
  }
  std::size_t evals = 0;
  for (const auto& [s, c] : approx.mu_evals) evals += c;

  Sink sink(out_path);
  write_header(sink.os(), "approx",
               in.describe() + " scales=" + join(sf.scales, '/') + " budgets=" +
                   join(sf.budgets, '/') + " variant=" + sf.variant +
                   " logit_scale=" + fmt(inputs.logit_scale) + " logit_bias=" + fmt(sf.logit_bias));
  sink.os() << "n,d,scales,budgets,variant,rel_error,mu_evals,predicted_mu_evals,"
               "uncovered_rows,wall_time_ms\n";
  sink.os() << n << "," << d << "," << join(sf.scales, '/') << "," << join(sf.budgets, '/') << ","
            << sf.variant << "," << fmt(rel) << "," << evals << ","
            << predicted_mu_evals(n, sf.scales, sf.budgets) << "," << approx.uncovered_row_count
            << "," << fmt(ms) << "\n";
  return 0;
}

int cmd_sweep(const InputFlags& in, const ScheduleFlags& sf, const std::string& out_path,
              const std::string& param, std::vector<double> grid,
              std::vector<std::string> methods, std::size_t b, double budget_fraction) {
  if (grid.empty()) throw std::runtime_error("--grid must be non-empty");
  for (const std::string& m : methods)
    if (m != "mra" && m != "mra-s" && m != "svd" && m != "sparse" && m != "rpca" && m != "haar")
      throw std::runtime_error("unknown method: " + m);

  Sink sink(out_path);
  write_header(sink.os(), "sweep",
               in.describe() + " param=" + param + " b=" + std::to_string(b));
  sink.os() << "method,param,value,workload_entries,rel_error,entropy\n";

  auto run_point = [&](const mra::GeneratedInputs& gi, double value, double fraction,
                       double keepfrac) {
    const std::size_t n = gi.Q.rows;
    const std::size_t d = gi.Q.cols;
    if (n % b != 0 || !mra::is_power_of_two(b))
      throw std::runtime_error("--b must be a power of two dividing n");
    mra::AttentionInputs inputs{gi.Q, gi.K, gi.V, sf.effective_scale(d), sf.logit_bias};
    mra::ExactAttentionOutput exact = mra::exact_attention(inputs, /*keep_dense=*/true);
    const double entropy = mra::attention_entropy(inputs);

    const std::size_t coarse = (n / b) * (n / b);
    const std::size_t m1 =
        std::min(coarse, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(coarse))));
    const std::size_t entries = m1 * b * b;

    for (const std::string& method : methods) {
      double rel = std::nan("");
      std::size_t workload = entries;
      if (method == "mra" || method == "mra-s") {
        mra::ResolutionSchedule sched;
        sched.scales = {b, 1};
        sched.budgets = {m1};
        const mra::PlanVariant variant =
            method == "mra" ? mra::PlanVariant::full : mra::PlanVariant::sparse_only;
        mra::ApproxOutput approx = mra::approx_attention(inputs, sched, variant);
        rel = mra::relative_error(approx.Z_hat, exact.Z);
      } else if (method == "svd") {
        const std::size_t rank = std::max<std::size_t>(1, (entries + 2 * n - 1) / (2 * n));
        mra::BaselineApprox lr = mra::lowrank_svd(*exact.A_dense, rank);
        rel = mra::relative_error(normalize_and_apply(lr.approx, gi.V), exact.Z);
        workload = rank * 2 * n;
      } else if (method == "sparse") {
        mra::BaselineApprox sp = mra::topk_sparse(*exact.A_dense, entries);
        rel = mra::relative_error(normalize_and_apply(sp.approx, gi.V), exact.Z);
      } else if (method == "rpca") {
        mra::DenseMatrix P = mra::dense_logits(inputs);
        mra::RpcaBlockSolution sol = mra::rpca_block_solution(P, b, m1);
        // The sparse part is stabilized like the oracle before normalizing.
        mra::DenseMatrix S = sol.S_dense;
        rel = mra::relative_error(normalize_and_apply(S, gi.V), exact.Z);
      } else {  // haar
        const double f = keepfrac > 0.0 ? keepfrac
                                        : static_cast<double>(entries) /
                                              static_cast<double>(n) / static_cast<double>(n);
        mra::HaarCoefficients coeffs = mra::haar2d_decompose(*exact.A_dense);
        mra::HaarReconstruction rec = mra::haar2d_reconstruct(coeffs, std::max(f, 1.0 / (n * n)));
        rel = mra::relative_error(normalize_and_apply(rec.approx, gi.V), exact.Z);
        workload = static_cast<std::size_t>(std::ceil(std::max(f, 1.0 / (n * n)) * n * n));
      }
      sink.os() << method << "," << param << "," << fmt(value) << "," << workload << ","
                << fmt(rel) << "," << fmt(entropy) << "\n";
    }
  };

  if (param == "entropy") {
    // Grid values are peaked-generator gains; everything else is fixed.
    for (double g : grid) {
      InputFlags flags = in;
      flags.kind = "peaked";
      flags.gain = g;
      run_point(mra::generate(flags.generator_spec()), g, budget_fraction, 0.0);
    }
  } else if (param == "budget") {
    mra::GeneratedInputs gi = in.load();
    for (double f : grid) run_point(gi, f, f, 0.0);
  } else if (param == "keepfrac") {
    mra::GeneratedInputs gi = in.load();
    for (double f : grid) run_point(gi, f, f, f);
  } else {
    throw std::runtime_error("--param must be budget, entropy, or keepfrac");
  }
  return 0;
}

int cmd_bounds(const InputFlags& in, const ScheduleFlags& sf, const std::string& out_path,
               double holder_p) {
  mra::GeneratedInputs gi = in.load();
  const std::size_t n = gi.Q.rows;
  const std::size_t d = gi.Q.cols;
  mra::AttentionInputs inputs{gi.Q, gi.K, gi.V, sf.effective_scale(d), sf.logit_bias};
  mra::DenseMatrix P = mra::dense_logits(inputs);
  mra::DenseMatrix expP(n, n, mra::Dtype::f64);
  for (std::size_t i = 0; i < P.size(); ++i) expP.data[i] = std::exp(P.data[i]);

  const std::size_t b = sf.scales.front();
  if (!mra::is_power_of_two(b) || n % b != 0)
    throw std::runtime_error("coarsest scale must be a power of two dividing n");

  Sink sink(out_path);
  write_header(sink.os(), "bounds",
               in.describe() + " scales=" + join(sf.scales, '/') +
                   " logit_scale=" + fmt(inputs.logit_scale));
  sink.os() << "label,r,a,c_r,c_2r,delta,lhs,rhs,holds\n";

  std::size_t violations = 0;
  auto emit = [&](const mra::BoundReport& rep) {
    mra::dump_bound_csv(rep, sink.os());
    if (!rep.holds) ++violations;
  };

  for (std::size_t x = 1; x <= n / b; ++x)
    for (std::size_t y = 1; y <= n / b; ++y) {
      const mra::ComponentId c{b, x, y};
      const double mu = std::exp(mra::mu_star(P, c));
      const double ms = mra::mu_star(expP, c);
      mra::BoundReport gap = mra::check_block_gap(P, c, ms, mu);
      gap.label = "block_gap_" + std::to_string(x) + "_" + std::to_string(y);
      emit(gap);
      mra::BoundReport sq = mra::mu_squared_vs_mu_prime(P, c);
      sq.label = "pooled_square_" + std::to_string(x) + "_" + std::to_string(y);
      emit(sq);
      mra::BoundReport range = mra::check_block_gap(P, c, ms, mu);
      range.rhs = mra::range_bound(gi.Q, gi.K, c, holder_p) * inputs.logit_scale;
      range.lhs = range.r;
      range.holds = mra::bound_holds(range.lhs, range.rhs);
      range.label = "range_" + std::to_string(x) + "_" + std::to_string(y);
      emit(range);
    }

  if (sf.scales.size() == 2 && sf.scales.back() == 1) {
    mra::BoundReport prop = mra::check_refinement_bound(P, b, std::min(sf.budgets.front(), (n / b) * (n / b)));
    prop.label = "refinement_error";
    emit(prop);
  }

  for (std::size_t j : {std::size_t{0}, n / 2, n - 1}) {
    mra::BoundReport haar = mra::haar_column_bound(gi.Q, gi.K, j, holder_p);
    haar.lhs *= inputs.logit_scale;
    haar.rhs *= inputs.logit_scale;
    haar.holds = mra::bound_holds(haar.lhs, haar.rhs);
    haar.label = "haar_column_" + std::to_string(j);
    emit(haar);
  }

  sink.os() << "# violations," << violations << "\n";
  return violations == 0 ? 0 : 1;
}

int cmd_haar(const std::string& a_path, const InputFlags& in, const ScheduleFlags& sf,
             const std::string& out_path, std::vector<double> keep, bool histogram) {
  mra::DenseMatrix A(1, 1, mra::Dtype::f64);
  std::string source;
  if (!a_path.empty()) {
    A = mra::read_tensor(a_path);
    source = "matrix " + a_path;
  } else {
    mra::GeneratedInputs gi = in.load();
    mra::AttentionInputs inputs{gi.Q, gi.K, gi.V, sf.effective_scale(gi.Q.cols), sf.logit_bias};
    mra::ExactAttentionOutput exact = mra::exact_attention(inputs, /*keep_dense=*/true);
    A = *exact.A_dense;
    source = "attention matrix from " + in.describe();
  }

  mra::HaarCoefficients coeffs = mra::haar2d_decompose(A);
  Sink sink(out_path);
  write_header(sink.os(), "haar", source);

  if (histogram) {
    // log10 magnitude histogram of all n^2 coefficients; zero coefficients
    // fall into the lowest bin.
    std::vector<double> flat = mra::haar_flatten(coeffs);
    const int lo = -16, hi = 4;
    std::vector<std::size_t> counts(static_cast<std::size_t>(hi - lo), 0);
    for (double v : flat) {
      const double m = std::abs(v);
      int bin = m == 0.0 ? 0 : static_cast<int>(std::floor(std::log10(m))) - lo;
      bin = std::max(0, std::min(bin, hi - lo - 1));
      ++counts[static_cast<std::size_t>(bin)];
    }
    sink.os() << "log10_lo,log10_hi,count\n";
    for (int i = 0; i < hi - lo; ++i)
      sink.os() << (lo + i) << "," << (lo + i + 1) << "," << counts[static_cast<std::size_t>(i)]
                << "\n";
    return 0;
  }

  sink.os() << "keep_fraction,kept_coefficients,rel_error\n";
  for (double f : keep) {
    mra::HaarReconstruction rec = mra::haar2d_reconstruct(coeffs, f);
    const std::size_t kept =
        static_cast<std::size_t>(std::ceil(f * static_cast<double>(coeffs.coefficient_count())));
    sink.os() << fmt(f) << "," << kept << "," << fmt(rec.rel_error) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multiresolution attention approximation toolkit"};
  app.require_subcommand(1);
  std::size_t threads = 1;
  app.add_option("--threads", threads, "worker threads (1 = reproducibility mode)")
      ->check(CLI::PositiveNumber);

  InputFlags gen_in, approx_in, sweep_in, bounds_in, haar_in;
  ScheduleFlags approx_sf, sweep_sf, bounds_sf, haar_sf;
  std::string gen_prefix, gen_dtype = "f64";
  std::string approx_out, sweep_out, bounds_out, haar_out;
  bool check_dense = true;
  std::string sweep_param = "budget";
  std::vector<double> sweep_grid;
  std::vector<std::string> sweep_methods{"mra"};
  std::size_t sweep_b = 32;
  double sweep_budget_fraction = 0.1;
  double holder_p = 2.0;
  std::string haar_a;
  std::vector<double> haar_keep{1.0};
  bool haar_hist = false;

  CLI::App* gen = app.add_subcommand("gen", "write synthetic Q/K/V tensors");
  gen_in.add_generator_options(gen);
  gen->add_option("--out-prefix", gen_prefix, "output path prefix")->required();
  gen->add_option("--dtype", gen_dtype, "on-disk precision")
      ->check(CLI::IsMember({"f32", "f64"}));

  CLI::App* approx = app.add_subcommand("approx", "run one approximation and report its error");
  approx_in.add_file_options(approx);
  approx_in.add_generator_options(approx);
  approx_sf.add_options(approx);
  approx->add_option("--out", approx_out, "output CSV path (default stdout)");
  approx->add_flag("--check-dense,!--no-check-dense", check_dense,
                   "compare against the dense oracle when feasible");

  CLI::App* sweep = app.add_subcommand("sweep", "error sweeps across methods and budgets");
  sweep_in.add_file_options(sweep);
  sweep_in.add_generator_options(sweep);
  sweep_sf.add_options(sweep);
  sweep->add_option("--param", sweep_param, "budget | entropy | keepfrac")
      ->check(CLI::IsMember({"budget", "entropy", "keepfrac"}));
  sweep->add_option("--grid", sweep_grid, "grid values")->delimiter(',')->required();
  sweep->add_option("--methods", sweep_methods, "mra,mra-s,svd,sparse,rpca,haar")->delimiter(',');
  sweep->add_option("--b", sweep_b, "coarse block size");
  sweep->add_option("--budget-fraction", sweep_budget_fraction,
                    "refined fraction used by entropy sweeps");
  sweep->add_option("--out", sweep_out, "output CSV path (default stdout)");

  CLI::App* bounds = app.add_subcommand("bounds", "check the approximation inequalities");
  bounds_in.add_file_options(bounds);
  bounds_in.add_generator_options(bounds);
  bounds_sf.add_options(bounds);
  bounds->add_option("--holder-p", holder_p, "exponent p of the range bound");
  bounds->add_option("--out", bounds_out, "output CSV path (default stdout)");

  CLI::App* haar = app.add_subcommand("haar", "Haar truncation study of a matrix");
  haar->add_option("--a", haar_a, "matrix path (.mrt or .csv)");
  haar_in.add_file_options(haar);
  haar_in.add_generator_options(haar);
  haar_sf.add_options(haar);
  haar->add_option("--keep", haar_keep, "keep fractions")->delimiter(',');
  haar->add_flag("--histogram", haar_hist, "emit a log10 coefficient-magnitude histogram");
  haar->add_option("--out", haar_out, "output CSV path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen(gen_in, gen_prefix, gen_dtype);
    if (approx->parsed()) return cmd_approx(approx_in, approx_sf, approx_out, check_dense);
    if (sweep->parsed())
      return cmd_sweep(sweep_in, sweep_sf, sweep_out, sweep_param, sweep_grid, sweep_methods,
                       sweep_b, sweep_budget_fraction);
    if (bounds->parsed()) return cmd_bounds(bounds_in, bounds_sf, bounds_out, holder_p);
    if (haar->parsed()) return cmd_haar(haar_a, haar_in, haar_sf, haar_out, haar_keep, haar_hist);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
