#include "cli.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "ipursuit/error.hpp"
#include "ipursuit/io.hpp"
#include "ipursuit/metrics.hpp"
#include "ipursuit/pipeline.hpp"

namespace ipursuit::cli {

using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw UsageError(what);
}

// "a:b:step", "a:b" or "a,b,c".
std::vector<int> parse_int_list(const std::string& text, const std::string& flag) {
  std::vector<int> out;
  auto to_int = [&](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    require(used == s.size() && !s.empty(), flag + ": '" + s + "' is not an integer");
    return v;
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    require(parts.size() == 2 || parts.size() == 3, flag + ": range must be a:b or a:b:step");
    const int a = to_int(parts[0]), b = to_int(parts[1]), step = parts.size() == 3 ? to_int(parts[2]) : 1;
    require(step > 0 && a <= b, flag + ": range needs a <= b and step > 0");
    for (int v = a; v <= b; v += step) out.push_back(v);
  } else {
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) out.push_back(to_int(p));
  }
  require(!out.empty(), flag + ": empty list");
  return out;
}

struct SolverFlags {
  double rho = 1.0;
  double tol = 1e-7;
  int max_iters = 20000;
  int polish_every = 100;
  bool full_route = false;

  void attach(CLI::App* app) {
    app->add_option("--rho", rho, "ADMM penalty");
    app->add_option("--tol", tol, "primal and dual residual tolerance");
    app->add_option("--max-iters", max_iters, "ADMM iteration cap per direction");
    app->add_option("--polish-every", polish_every, "vertex polishing period, 0 disables");
    app->add_flag("--full-route", full_route, "solve in the ambient space instead of span(D)");
  }
  SolverConfig config() const {
    SolverConfig c;
    c.rho = rho;
    c.primal_tol = c.dual_tol = tol;
    c.max_iters = max_iters;
    c.polish_every = polish_every;
    c.reduce_to_span = !full_route;
    return c;
  }
  void validate() const {
    try {
      config().validate();
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  json echo() const {
    return json{{"rho", rho}, {"tol", tol}, {"max_iters", max_iters}, {"polish_every", polish_every},
                {"full_route", full_route}};
  }
};

struct Common {
  std::uint64_t seed = 0;
  int workers = 0;
  bool timing = false;

  void attach(CLI::App* app) {
    app->add_option("--seed", seed, "random seed");
    app->add_option("--workers", workers, std::string("worker threads (default from ") + kWorkersEnv + ")");
    app->add_flag("--timing", timing, "record wall-clock time (outputs are then no longer byte-reproducible)");
  }
  void apply_workers() const {
    int w = workers;
    if (w == 0) {
      if (const char* env = std::getenv(kWorkersEnv); env && *env) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        require(*end == '\0' && v > 0 && v < 4096, std::string(kWorkersEnv) + " must be a positive integer");
        w = static_cast<int>(v);
      }
    }
    require(w >= 0, "--workers must be >= 0");
    if (w > 0) omp_set_num_threads(w);
  }
};

json record(const std::string& command, const Common& common, json config) {
  return json{{"command", command}, {"version", kVersion}, {"seed", common.seed}, {"config", std::move(config)}};
}

void add_timing(json& rec, const Common& common, std::chrono::steady_clock::time_point start) {
  if (!common.timing) return;
  rec["timing_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::filesystem::path sidecar(const std::string& path) { return std::filesystem::path(path + ".meta.json"); }

void require_input(const std::string& path) {
  require(!path.empty(), "--input is required");
  require(std::filesystem::is_regular_file(path), "--input: no such file '" + path + "'");
}

void require_writable(const std::string& path, const std::string& flag) {
  if (path.empty()) return;
  const auto parent = std::filesystem::absolute(path).parent_path();
  require(std::filesystem::is_directory(parent), flag + ": directory '" + parent.string() + "' does not exist");
}

EnhancePolicy parse_enhance(const std::string& text) {
  if (text == "none") return std::monostate{};
  if (text == "auto") return AutoShat{};
  std::size_t used = 0;
  int v = -1;
  try {
    v = std::stoi(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  require(used == text.size() && v >= 0, "--enhance must be none, auto or a nonnegative integer");
  return v;
}

double sample_std(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

// Runs body(i) for i in [0, n) across workers and rethrows the first failure.
template <class F>
void parallel_jobs(int n, F&& body) {
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

// ---- cluster ---------------------------------------------------------------------

struct ClusterCmd {
  std::string input, out, labels_out, enhance = "none", method = "ipursuit";
  int k = 0, q = 3;
  SolverFlags solver;
  Common common;

  void attach(CLI::App* app) {
    app->add_option("--input", input, "CSV, one point per row")->required();
    app->add_option("--k", k, "number of clusters")->required();
    app->add_option("--enhance", enhance, "none, auto or ŝ");
    app->add_option("--q", q, "entries kept per affinity row");
    app->add_option("--method", method, "ipursuit, tsc or kmeans")
        ->check(CLI::IsMember({"ipursuit", "tsc", "kmeans"}));
    app->add_option("--out", out, "JSON result record");
    app->add_option("--labels-out", labels_out, "labels CSV");
    solver.attach(app);
    common.attach(app);
  }

  json echo() const {
    return json{{"input", input}, {"k", k}, {"q", q}, {"enhance", enhance}, {"method", method},
                {"solver", solver.echo()}};
  }

  int run(std::ostream& out_stream) {
    require(k >= 1, "--k must be >= 1");
    require(q >= 1, "--q must be >= 1");
    const EnhancePolicy policy = parse_enhance(enhance);
    solver.validate();
    require_input(input);
    require_writable(out, "--out");
    require_writable(labels_out, "--labels-out");
    common.apply_workers();

    const auto start = std::chrono::steady_clock::now();
    const DataMatrix d = load_csv(input);
    require(k <= d.size(), "--k exceeds the number of points");
    Rng rng(common.seed);
    json metrics;
    Labels labels;
    if (method == "ipursuit") {
      const PipelineResult res = run_pipeline(d, k, q, solver.config(), policy, rng);
      labels = res.assignment.labels;
      metrics["s_hat"] = res.s_hat;
      int nonconverged = 0;
      for (bool c : res.directions.converged_flags) nonconverged += c ? 0 : 1;
      metrics["nonconverged_directions"] = nonconverged;
      if (d.labels) metrics["cross_affinity_ratio"] = cross_affinity_ratio(res.affinity, *d.labels);
    } else if (method == "tsc") {
      labels = tsc_baseline(d, k, q, rng).labels;
    } else {
      labels = kmeans_baseline(d, k, rng).labels;
    }
    metrics["points"] = d.size();
    metrics["ambient_dim"] = d.ambient_dim();
    if (d.labels) {
      const double acc = clustering_accuracy(labels, *d.labels);
      metrics["accuracy"] = acc;
      out_stream << "accuracy " << format_double(acc) << "\n";
    }
    json rec = record("cluster", common, echo());
    rec["metrics"] = metrics;
    add_timing(rec, common, start);
    if (!labels_out.empty()) write_file_atomic(labels_out, labels_csv(labels));
    if (!out.empty()) write_file_atomic(out, dump(rec));
    return 0;
  }
};

// ---- synth-sweep -----------------------------------------------------------------

struct SweepCmd {
  std::string preset, s_list_text, k_list_text, out;
  int big_m = 0, k = 0, s = -1, m_offset = 2, shat_offset = 5, n = 50, trials = 10, q = 3;
  SolverFlags solver;
  Common common;

  void attach(CLI::App* app) {
    app->add_option("--preset", preset, "fig2a (sweep s) or fig2b (sweep K)")
        ->check(CLI::IsMember({"fig2a", "fig2b"}));
    app->add_option("--M", big_m, "ambient dimension");
    app->add_option("--K", k, "clusters (s sweep)");
    app->add_option("--s", s, "intersection dimension (K sweep)");
    app->add_option("--m-offset", m_offset, "cluster dimension m = s + offset");
    app->add_option("--s-list", s_list_text, "s values, a:b:step or a,b,c");
    app->add_option("--k-list", k_list_text, "K values, a:b:step or a,b,c");
    app->add_option("--shat-offset", shat_offset, "enhanced run removes ŝ = s - offset directions");
    app->add_option("--n-per-cluster", n, "points per cluster");
    app->add_option("--trials", trials, "trials per grid point");
    app->add_option("--q", q, "entries kept per affinity row");
    app->add_option("--out", out, "CSV table")->required();
    solver.attach(app);
    common.attach(app);
  }

  struct Point {
    int big_m, k, m, s;
  };

  std::string param_name() const { return k_list_text.empty() ? "s" : "K"; }

  std::vector<Point> grid() {
    if (preset == "fig2a") {
      big_m = 60, k = 10, m_offset = 2, shat_offset = 5;
      if (s_list_text.empty()) s_list_text = "10:40:1";
      k_list_text.clear();
    } else if (preset == "fig2b") {
      big_m = 60, s = 40, m_offset = 2, shat_offset = 5;
      if (k_list_text.empty()) k_list_text = "5:10:1";
      s_list_text.clear();
    }
    require(big_m >= 1, "--M is required");
    require(s_list_text.empty() != k_list_text.empty(), "give exactly one of --s-list and --k-list");
    require(m_offset >= 1, "--m-offset must be >= 1");
    std::vector<Point> pts;
    if (!s_list_text.empty()) {
      require(k >= 1, "--K must be >= 1 for an s sweep");
      for (int sv : parse_int_list(s_list_text, "--s-list")) pts.push_back(Point{big_m, k, sv + m_offset, sv});
    } else {
      require(s >= 0, "--s must be >= 0 for a K sweep");
      for (int kv : parse_int_list(k_list_text, "--k-list")) pts.push_back(Point{big_m, kv, s + m_offset, s});
    }
    for (const Point& p : pts) {
      require(p.s >= 0 && p.k >= 1, "grid values must be nonnegative s and positive K");
      require(p.k * (p.m - p.s) + p.s <= p.big_m,
              "K(m-s)+s exceeds M at s=" + std::to_string(p.s) + ", K=" + std::to_string(p.k));
    }
    return pts;
  }

  json echo() const {
    return json{{"preset", preset},         {"M", big_m},          {"K", k},
                {"s", s},                   {"m_offset", m_offset}, {"s_list", s_list_text},
                {"k_list", k_list_text},    {"shat_offset", shat_offset}, {"n_per_cluster", n},
                {"trials", trials},         {"q", q},              {"solver", solver.echo()}};
  }

  int run(std::ostream& out_stream) {
    const std::vector<Point> pts = grid();
    require(n >= 1, "--n-per-cluster must be >= 1");
    require(trials >= 1, "--trials must be >= 1");
    require(q >= 1, "--q must be >= 1");
    solver.validate();
    require_writable(out, "--out");
    common.apply_workers();

    const auto start = std::chrono::steady_clock::now();
    const int jobs = static_cast<int>(pts.size()) * trials;
    std::vector<double> plain(static_cast<std::size_t>(jobs)), enhanced(static_cast<std::size_t>(jobs));
    const Rng root(common.seed);
    const SolverConfig cfg = solver.config();
    parallel_jobs(jobs, [&](int job) {
      const Point& p = pts[static_cast<std::size_t>(job / trials)];
      const Rng trial = root.split(static_cast<std::uint64_t>(job / trials)).split(static_cast<std::uint64_t>(job % trials));
      Rng data_rng = trial.split(0);
      const auto ens = make_ensemble_fully_random(p.big_m, p.k, p.m, p.s, data_rng);
      const DataMatrix d = sample_points(ens, n, data_rng);
      Rng r1 = trial.split(1), r2 = trial.split(1);
      const int shat = std::max(0, p.s - shat_offset);
      plain[static_cast<std::size_t>(job)] =
          clustering_accuracy(run_pipeline(d, p.k, q, cfg, std::monostate{}, r1).assignment.labels, *d.labels);
      enhanced[static_cast<std::size_t>(job)] =
          clustering_accuracy(run_pipeline(d, p.k, q, cfg, shat, r2).assignment.labels, *d.labels);
    });

    std::string csv = "param,value,method,mean_accuracy,std_accuracy,trials\n";
    const std::string name = param_name();
    for (std::size_t g = 0; g < pts.size(); ++g) {
      const int value = name == "s" ? pts[g].s : pts[g].k;
      for (const auto& [method, acc] : {std::pair{"ipursuit", &plain}, std::pair{"enhanced", &enhanced}}) {
        std::vector<double> v(acc->begin() + static_cast<std::ptrdiff_t>(g) * trials,
                              acc->begin() + static_cast<std::ptrdiff_t>(g + 1) * trials);
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= trials;
        csv += name + "," + std::to_string(value) + "," + method + "," + format_double(mean) + "," +
               format_double(sample_std(v, mean)) + "," + std::to_string(trials) + "\n";
      }
    }
    json rec = record("synth-sweep", common, echo());
    add_timing(rec, common, start);
    write_file_atomic(out, csv);
    write_file_atomic(sidecar(out), dump(rec));
    out_stream << "wrote " << pts.size() * 2 << " rows to " << out << "\n";
    return 0;
  }
};

// ---- ratio-experiment ------------------------------------------------------------

struct RatioCmd {
  int big_m = 10000, k = 10, trials = 50;
  double m_ratio = 1.5;
  std::string s_list_text = "10:300:10", out;
  bool sqrt_convention = false;
  Common common;

  void attach(CLI::App* app) {
    app->add_option("--M", big_m, "ambient dimension");
    app->add_option("--K", k, "clusters");
    app->add_option("--s-list", s_list_text, "s values, a:b:step or a,b,c");
    app->add_option("--m-ratio", m_ratio, "m = round(ratio * s)");
    app->add_option("--trials", trials, "trials per s");
    app->add_option("--out", out, "CSV table")->required();
    app->add_flag("--sqrt-convention", sqrt_convention, "report cos(θ1)/√T instead of cos²(θ1)/T");
    common.attach(app);
  }

  int run(std::ostream& out_stream) {
    const std::vector<int> s_list = parse_int_list(s_list_text, "--s-list");
    require(big_m >= 1 && k >= 1, "--M and --K must be >= 1");
    require(trials >= 1, "--trials must be >= 1");
    require(m_ratio > 1.0, "--m-ratio must exceed 1");
    for (int s : s_list) {
      const int m = static_cast<int>(std::lround(m_ratio * s));
      require(s >= 0 && m > s && k * (m - s) + s <= big_m, "s=" + std::to_string(s) + " gives invalid dimensions");
    }
    require_writable(out, "--out");
    common.apply_workers();

    const auto start = std::chrono::steady_clock::now();
    const auto rows = ratio_experiment(big_m, k, s_list, m_ratio, trials, Rng(common.seed), sqrt_convention);
    std::string csv = "s,m,T,mean_ratio,min_ratio,max_ratio\n";
    for (const RatioRow& r : rows)
      csv += std::to_string(r.s) + "," + std::to_string(r.m) + "," + format_double(limiting_T(big_m, r.m, k, r.s)) +
             "," + format_double(r.mean_ratio) + "," + format_double(r.min_ratio) + "," +
             format_double(r.max_ratio) + "\n";
    json rec = record("ratio-experiment", common,
                      json{{"M", big_m}, {"K", k}, {"s_list", s_list_text}, {"m_ratio", m_ratio}, {"trials", trials},
                           {"sqrt_convention", sqrt_convention}});
    add_timing(rec, common, start);
    write_file_atomic(out, csv);
    write_file_atomic(sidecar(out), dump(rec));
    out_stream << "wrote " << rows.size() << " rows to " << out << "\n";
    return 0;
  }
};

// ---- theory-check ----------------------------------------------------------------

Matrix matrix_from_columns(const json& cols, Index rows_hint) {
  if (!cols.is_array()) throw Error(ErrorCode::ParseError, "matrix must be an array of columns");
  Matrix m(rows_hint, static_cast<Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const auto& col = cols[c];
    if (!col.is_array() || static_cast<Index>(col.size()) != rows_hint)
      throw Error(ErrorCode::ParseError, "column " + std::to_string(c) + " has the wrong length");
    for (std::size_t r = 0; r < col.size(); ++r) m(static_cast<Index>(r), static_cast<Index>(c)) = col[r].get<double>();
  }
  return m;
}

// {"intersection": [[...], ...], "innovations": [[[...], ...], ...]}, matrices as column lists.
SubspaceEnsemble load_ensemble(const std::string& path, Index ambient_dim) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("ensemble JSON: ") + e.what());
  }
  std::vector<Matrix> blocks;
  for (const auto& blk : j.at("innovations")) blocks.push_back(matrix_from_columns(blk, ambient_dim));
  const Matrix u = j.contains("intersection") ? matrix_from_columns(j["intersection"], ambient_dim)
                                              : Matrix(ambient_dim, 0);
  return make_ensemble_deterministic(u, blocks);
}

SubspaceEnsemble orthogonal_ensemble(int big_m, int k, int m, int s) {
  Matrix u = Matrix::Zero(big_m, s);
  for (int i = 0; i < s; ++i) u(i, i) = 1.0;
  std::vector<Matrix> blocks;
  for (int c = 0; c < k; ++c) {
    Matrix b = Matrix::Zero(big_m, m - s);
    for (int i = 0; i < m - s; ++i) b(s + c * (m - s) + i, i) = 1.0;
    blocks.push_back(b);
  }
  return make_ensemble_deterministic(u, blocks);
}

struct TheoryCmd {
  std::string model = "fully-random", input, ensemble, out;
  int big_m = 0, k = 0, m = 0, s = 0, n = 0, restarts = 32, q = 3;
  std::optional<double> kappa;
  SolverFlags solver;
  Common common;

  void attach(CLI::App* app) {
    app->add_option("--model", model, "fully-random or orthogonal (synthetic data)")
        ->check(CLI::IsMember({"fully-random", "orthogonal"}));
    app->add_option("--M", big_m, "ambient dimension");
    app->add_option("--K", k, "clusters");
    app->add_option("--m", m, "cluster dimension");
    app->add_option("--s", s, "intersection dimension");
    app->add_option("--n", n, "points per cluster");
    app->add_option("--kappa", kappa, "κ for the leading singular vector bound");
    app->add_option("--restarts", restarts, "permeance local-search restarts");
    app->add_option("--q", q, "entries kept per affinity row");
    app->add_option("--input", input, "labelled CSV instead of synthetic data");
    app->add_option("--ensemble", ensemble, "ensemble JSON for --input");
    app->add_option("--out", out, "JSON report")->required();
    solver.attach(app);
    common.attach(app);
  }

  json echo() const {
    return json{{"model", model}, {"input", input}, {"ensemble", ensemble}, {"M", big_m},     {"K", k},
                {"m", m},         {"s", s},         {"n", n},               {"restarts", restarts},
                {"q", q},         {"kappa", kappa ? json(*kappa) : json(nullptr)}, {"solver", solver.echo()}};
  }

  int run(std::ostream& out_stream) {
    const bool from_file = !input.empty();
    if (from_file) {
      require_input(input);
      require(!ensemble.empty() && std::filesystem::is_regular_file(ensemble), "--input needs an --ensemble file");
    } else {
      require(big_m >= 1 && k >= 1 && n >= 1, "--M, --K and --n must be >= 1");
      require(s >= 0 && m > s, "need 0 <= s < m");
      require(k * (m - s) + s <= big_m, "K(m-s)+s exceeds M");
    }
    require(restarts >= 1, "--restarts must be >= 1");
    require(q >= 1, "--q must be >= 1");
    solver.validate();
    require_writable(out, "--out");
    common.apply_workers();

    const auto start = std::chrono::steady_clock::now();
    Rng rng(common.seed);
    DataMatrix d;
    SubspaceEnsemble ens;
    if (from_file) {
      d = load_csv(input);
      if (!d.labels) throw Error(ErrorCode::MissingLabels, "--input needs a label column");
      ens = load_ensemble(ensemble, d.ambient_dim());
    } else {
      Rng data_rng = rng.split(0);
      ens = model == "orthogonal" ? orthogonal_ensemble(big_m, k, m, s)
                                  : make_ensemble_fully_random(big_m, k, m, s, data_rng);
      d = sample_points(ens, n, data_rng);
    }
    const int clusters = static_cast<int>(ens.num_clusters());
    const TheoryReport report =
        make_theory_report(ens, d, TheoryInputs{from_file ? 0 : n, kappa, restarts, common.seed});
    Rng cluster_rng = rng.split(1);
    const PipelineResult res = run_pipeline(d, clusters, q, solver.config(), std::monostate{}, cluster_rng);
    const double acc = clustering_accuracy(res.assignment.labels, *d.labels);

    json rec = record("theory-check", common, echo());
    rec["report"] = report_to_json(report);
    rec["metrics"] = json{{"accuracy", acc}, {"cross_affinity_ratio", cross_affinity_ratio(res.affinity, *d.labels)}};
    add_timing(rec, common, start);
    write_file_atomic(out, dump(rec));
    out_stream << "theorem1_ok " << (report.theorem1_ok ? "true" : "false") << " accuracy " << format_double(acc)
               << "\n";
    return 0;
  }
};

// ---- singular-values -------------------------------------------------------------

struct SingularCmd {
  std::string input, out;
  int top = 50;
  Common common;

  void attach(CLI::App* app) {
    app->add_option("--input", input, "CSV, one point per row")->required();
    app->add_option("--out", out, "CSV of singular values")->required();
    app->add_option("--top", top, "number of values to emit");
    common.attach(app);
  }

  int run(std::ostream& out_stream) {
    require(top >= 1, "--top must be >= 1");
    require_input(input);
    require_writable(out, "--out");
    common.apply_workers();

    const auto start = std::chrono::steady_clock::now();
    const DataMatrix d = load_csv(input);
    const ThinSvd svd = thin_svd(d.points);
    const Index r = svd.rank();
    const int shat = r < 2 ? 0 : estimate_shat(svd.singular_values.head(r));
    std::string csv = "index,singular_value\n";
    const Index count = std::min<Index>(top, svd.singular_values.size());
    for (Index i = 0; i < count; ++i)
      csv += std::to_string(i + 1) + "," + format_double(svd.singular_values(i)) + "\n";
    json rec = record("singular-values", common, json{{"input", input}, {"top", top}});
    rec["metrics"] = json{{"s_hat", shat}, {"rank", r}};
    add_timing(rec, common, start);
    write_file_atomic(out, csv);
    write_file_atomic(sidecar(out), dump(rec));
    out_stream << "s_hat " << shat << "\n";
    return 0;
  }
};

}  // namespace

json report_to_json(const TheoryReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  return json{{"h1_est", r.h1_est},
              {"h2_est", r.h2_est},
              {"t1", r.t1},
              {"t2", r.t2},
              {"t3", r.t3},
              {"innovation_assumption", r.innovation_assumption},
              {"theorem1_ok", r.theorem1_ok},
              {"zeta", opt(r.zeta)},
              {"theorem2_prob", opt(r.theorem2_prob)},
              {"theorem2_epsilon", opt(r.theorem2_epsilon)},
              {"h1_bound", opt(r.h1_bound)},
              {"h2_bound", opt(r.h2_bound)},
              {"T_limit", opt(r.T_limit)},
              {"mu", opt(r.mu)},
              {"sigma", opt(r.sigma)},
              {"theorem4_bound", opt(r.theorem4_bound)},
              {"theorem4_prob", opt(r.theorem4_prob)},
              {"kappa_prime", opt(r.kappa_prime)},
              {"theorem4_epsilon", opt(r.theorem4_epsilon)}};
}

TheoryReport report_from_json(const json& j) {
  auto opt = [&](const char* key) -> std::optional<double> {
    const json& v = j.at(key);
    if (v.is_null()) return std::nullopt;
    return v.get<double>();
  };
  TheoryReport r;
  r.h1_est = j.at("h1_est").get<double>();
  r.h2_est = j.at("h2_est").get<double>();
  r.t1 = j.at("t1").get<double>();
  r.t2 = j.at("t2").get<double>();
  r.t3 = j.at("t3").get<double>();
  r.innovation_assumption = j.at("innovation_assumption").get<bool>();
  r.theorem1_ok = j.at("theorem1_ok").get<bool>();
  r.zeta = opt("zeta");
  r.theorem2_prob = opt("theorem2_prob");
  r.theorem2_epsilon = opt("theorem2_epsilon");
  r.h1_bound = opt("h1_bound");
  r.h2_bound = opt("h2_bound");
  r.T_limit = opt("T_limit");
  r.mu = opt("mu");
  r.sigma = opt("sigma");
  r.theorem4_bound = opt("theorem4_bound");
  r.theorem4_prob = opt("theorem4_prob");
  r.kappa_prime = opt("kappa_prime");
  r.theorem4_epsilon = opt("theorem4_epsilon");
  return r;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Innovation pursuit subspace clustering"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  ClusterCmd cluster;
  SweepCmd sweep;
  RatioCmd ratio;
  TheoryCmd theory;
  SingularCmd singular;
  CLI::App* c_cluster = app.add_subcommand("cluster", "cluster a CSV file");
  CLI::App* c_sweep = app.add_subcommand("synth-sweep", "accuracy sweep on synthetic ensembles");
  CLI::App* c_ratio = app.add_subcommand("ratio-experiment", "principal-angle ratio table");
  CLI::App* c_theory = app.add_subcommand("theory-check", "theory report for one ensemble");
  CLI::App* c_singular = app.add_subcommand("singular-values", "singular values and ŝ recommendation");
  cluster.attach(c_cluster);
  sweep.attach(c_sweep);
  ratio.attach(c_ratio);
  theory.attach(c_theory);
  singular.attach(c_singular);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (c_cluster->parsed()) return cluster.run(out);
    if (c_sweep->parsed()) return sweep.run(out);
    if (c_ratio->parsed()) return ratio.run(out);
    if (c_theory->parsed()) return theory.run(out);
    if (c_singular->parsed()) return singular.run(out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace ipursuit::cli
