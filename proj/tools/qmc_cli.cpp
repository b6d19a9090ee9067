// Command-line front end: point-set generation, fast transforms, kernel
// algebra over structured Gram matrices, randomized QMC integration, and a
// convergence-study harness. Every run echoes its fully resolved
// configuration; identical configs reproduce identical outputs.
//
// Exit codes: 0 success / tolerance met, 1 tolerance not met, 2 usage error,
// 3 numeric failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <complex>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qmc/qmc.hpp"

using json = nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

enum ExitCode { kOk = 0, kToleranceMiss = 1, kUsage = 2, kNumeric = 3 };

std::uint64_t default_seed() {
  if (const char* env = std::getenv("QMC_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw CLI::ValidationError("QMC_SEED", "QMC_SEED must be a nonnegative integer");
    }
  }
  return 0;
}

qmc::Generator parse_generator(const std::string& s) {
  if (s == "lattice") return qmc::Generator::lattice;
  if (s == "dnet") return qmc::Generator::dnet;
  if (s == "halton") return qmc::Generator::halton;
  if (s == "iid") return qmc::Generator::iid;
  throw CLI::ValidationError("--type", "unknown generator: " + s);
}

qmc::PointOrder parse_order(const std::string& s) {
  if (s == "linear") return qmc::PointOrder::linear;
  if (s == "radical-inverse" || s == "natural") return qmc::PointOrder::radical_inverse;
  if (s == "gray-code" || s == "gray") return qmc::PointOrder::gray_code;
  throw CLI::ValidationError("--order", "unknown order: " + s);
}

qmc::RandKind parse_rand(const std::string& s) {
  using qmc::RandKind;
  if (s == "none") return RandKind::none;
  if (s == "shift") return RandKind::shift;
  if (s == "digital-shift" || s == "ds") return RandKind::digital_shift;
  if (s == "permutation" || s == "dp") return RandKind::permutation;
  if (s == "lms") return RandKind::lms;
  if (s == "lms-shift") return RandKind::lms_shift;
  if (s == "lms-permutation") return RandKind::lms_permutation;
  if (s == "nus") return RandKind::nus;
  if (s == "qrng") return RandKind::qrng;
  throw CLI::ValidationError("--rand", "unknown randomization: " + s);
}

qmc::LmsFamily parse_family(const std::string& s) {
  if (s == "matousek") return qmc::LmsFamily::matousek;
  if (s == "tezuka") return qmc::LmsFamily::tezuka;
  if (s == "owen-striped") return qmc::LmsFamily::owen_striped;
  throw CLI::ValidationError("--lms-family", "unknown family: " + s);
}

// Shared sampler flags for gen/kernel/integrate.
struct SamplerFlags {
  std::string type = "dnet";
  unsigned d = 1;
  std::size_t R = 1;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string order;
  std::string rand;
  unsigned alpha = 1;
  std::string lms_family = "matousek";
  std::string gvector_file;
  std::string matrices_file;

  void attach(CLI::App* app, bool with_R = true) {
    app->add_option("--type", type, "Generator: lattice | dnet | halton | iid");
    app->add_option("--d", d, "Dimension")->check(CLI::PositiveNumber);
    if (with_R) app->add_option("--R", R, "Randomizations (replications)");
    auto* s = app->add_option("--seed", seed, "RNG seed (default: QMC_SEED env or 0)");
    s->each([this](const std::string&) { seed_set = true; });
    app->add_option("--order", order,
                    "Point order: linear | radical-inverse | gray-code (generator default)");
    app->add_option("--rand", rand, "Randomization kind (generator default)");
    app->add_option("--alpha", alpha, "Digital interlacing order (dnet only)");
    app->add_option("--lms-family", lms_family, "LMS family: matousek | tezuka | owen-striped");
    app->add_option("--gvector", gvector_file, "Lattice generating-vector file");
    app->add_option("--matrices", matrices_file, "Digital-net generating-matrix file");
  }

  std::uint64_t resolved_seed() const { return seed_set ? seed : default_seed(); }

  qmc::SamplerSpec resolve() const {
    qmc::SamplerSpec s;
    s.type = parse_generator(type);
    s.d = d;
    s.seed = resolved_seed();
    s.alpha = alpha;
    s.lms_family = parse_family(lms_family);
    if (!order.empty()) s.order = parse_order(order);
    if (!rand.empty()) {
      s.rand = parse_rand(rand);
    } else {
      switch (s.type) {
        case qmc::Generator::lattice: s.rand = qmc::RandKind::shift; break;
        case qmc::Generator::dnet: s.rand = qmc::RandKind::lms_shift; break;
        case qmc::Generator::halton: s.rand = qmc::RandKind::digital_shift; break;
        case qmc::Generator::iid: s.rand = qmc::RandKind::none; break;
      }
    }
    if (!gvector_file.empty()) s.lattice_vector = qmc::io::import_lattice_vector(gvector_file);
    if (!matrices_file.empty()) s.matrices = qmc::io::read_dnet_matrices(matrices_file);
    return s;
  }

  std::string echo(std::size_t n) const {
    std::ostringstream os;
    os << "type=" << type << " d=" << d << " n=" << n << " R=" << R
       << " seed=" << resolved_seed() << " order=" << (order.empty() ? "(default)" : order)
       << " rand=" << (rand.empty() ? "(default)" : rand) << " alpha=" << alpha
       << " lms-family=" << lms_family;
    if (!gvector_file.empty()) os << " gvector=" << gvector_file;
    if (!matrices_file.empty()) os << " matrices=" << matrices_file;
    return os.str();
  }
};

qmc::PointBatch generate_batch(const SamplerFlags& flags, std::size_t n) {
  auto spec = flags.resolve();
  switch (spec.type) {
    case qmc::Generator::lattice: {
      if (spec.alpha > 1)
        throw CLI::ValidationError("--alpha", "interlacing applies to digital nets");
      auto gv = spec.lattice_vector ? *spec.lattice_vector : qmc::default_lattice_vector(spec.d);
      qmc::PointOrder order = flags.order.empty() ? qmc::PointOrder::radical_inverse
                                                  : parse_order(flags.order);
      if (spec.rand == qmc::RandKind::shift) {
        auto shifts = qmc::random_shifts(spec.d, flags.R, spec.seed);
        auto b = qmc::lattice_points(gv, n, order, &shifts);
        b.seed = spec.seed;
        return b;
      }
      if (spec.rand != qmc::RandKind::none)
        throw CLI::ValidationError("--rand", "lattices randomize with shifts");
      auto b = qmc::lattice_points(gv, n, order, nullptr);
      b.seed = spec.seed;
      return b;
    }
    case qmc::Generator::dnet: {
      qmc::DnetConfig cfg;
      cfg.d = spec.d;
      cfg.alpha = spec.alpha;
      cfg.order = flags.order.empty() ? qmc::PointOrder::radical_inverse : parse_order(flags.order);
      cfg.rand = spec.rand;
      cfg.lms_family = spec.lms_family;
      cfg.R = flags.R;
      cfg.seed = spec.seed;
      if (spec.matrices) cfg.C = *spec.matrices;
      return qmc::dnet_points(cfg, n);
    }
    case qmc::Generator::halton: {
      qmc::HaltonConfig cfg;
      cfg.d = spec.d;
      cfg.rand = spec.rand;
      cfg.R = flags.R;
      cfg.seed = spec.seed;
      cfg.interlace_alpha = spec.alpha;
      return qmc::halton_points(cfg, n);
    }
    case qmc::Generator::iid: {
      qmc::PointBatch b;
      b.R = flags.R;
      b.n = n;
      b.d = spec.d;
      b.generator = qmc::Generator::iid;
      b.rand = qmc::RandKind::none;
      b.seed = spec.seed;
      b.x.resize(flags.R * n * spec.d);
      for (std::size_t r = 0; r < flags.R; ++r) {
        qmc::ReplicationSampler gen(spec, r);
        gen.fill(0, n, b.x.data() + r * n * spec.d);
      }
      return b;
    }
  }
  throw CLI::ValidationError("--type", "unreachable");
}

// Column files: comma-separated columns, one row per line.
std::vector<std::vector<double>> read_columns(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw qmc::parse_error("cannot open " + path);
  std::vector<std::vector<double>> cols;
  std::string line;
  std::size_t ln = 0, rows = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string tok;
    std::size_t c = 0;
    while (std::getline(ss, tok, ',')) {
      if (cols.size() <= c) {
        if (rows > 0) throw qmc::parse_error("ragged column file", ln);
        cols.resize(c + 1);
      }
      try {
        cols[c].push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw qmc::parse_error("bad value '" + tok + "'", ln);
      }
      ++c;
    }
    if (c != cols.size()) throw qmc::parse_error("ragged column file", ln);
    ++rows;
  }
  if (cols.empty()) throw qmc::parse_error("empty column file: " + path);
  return cols;
}

void write_columns(const std::vector<std::vector<double>>& cols, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw qmc::parse_error("cannot write " + path);
  out.precision(17);
  for (std::size_t r = 0; r < cols[0].size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c][r];
    out << '\n';
  }
}

struct KernelFlags {
  std::string family = "dsi";
  std::vector<unsigned> alpha;
  double gamma = 1.0;
  std::vector<double> eta;

  void attach(CLI::App* app) {
    app->add_option("--family", family, "Kernel family: si | dsi");
    app->add_option("--kernel-alpha", alpha, "Per-dimension smoothness (1 value broadcasts)");
    app->add_option("--gamma", gamma, "Global scale")->check(CLI::PositiveNumber);
    app->add_option("--eta", eta, "Product weights (1 value broadcasts)");
  }

  qmc::KernelSpec resolve(unsigned d) const {
    qmc::KernelFamily fam;
    if (family == "si" || family == "si-bernoulli") fam = qmc::KernelFamily::si_bernoulli;
    else if (family == "dsi" || family == "dsi-walsh") fam = qmc::KernelFamily::dsi_walsh;
    else throw CLI::ValidationError("--family", "unknown kernel family: " + family);
    std::vector<unsigned> a = alpha;
    if (a.empty()) a.assign(d, 2);
    else if (a.size() == 1) a.assign(d, alpha[0]);
    else if (a.size() != d) throw CLI::ValidationError("--kernel-alpha", "need 1 or d values");
    std::vector<double> e = eta;
    if (e.empty()) e.assign(d, 1.0);
    else if (e.size() == 1) e.assign(d, eta[0]);
    else if (e.size() != d) throw CLI::ValidationError("--eta", "need 1 or d values");
    return qmc::KernelSpec::product(fam, a, gamma, e);
  }
};

int run_cli(CLI::App& app, int argc, char** argv);

int dispatch(int argc, char** argv) {
  CLI::App app{"randomized low-discrepancy sequences, fast kernel algebra, and RQMC"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  return run_cli(app, argc, argv);
}

int run_cli(CLI::App& app, int argc, char** argv) {
  // ---- gen ----
  auto* gen = app.add_subcommand("gen", "Generate a randomized point batch");
  SamplerFlags gen_flags;
  gen_flags.attach(gen);
  std::size_t gen_n = 8;
  std::string gen_out = "points.csv", gen_format = "csv";
  gen->add_option("--n", gen_n, "Points per replication")->check(CLI::PositiveNumber);
  gen->add_option("--out", gen_out, "Output file");
  gen->add_option("--format", gen_format, "csv | binary");

  // ---- transform ----
  auto* tr = app.add_subcommand("transform", "Apply fftbr | ifftbr | fwht to column vectors");
  std::string tr_op = "fwht", tr_in, tr_out = "transformed.csv";
  bool tr_complex_in = false;
  tr->add_option("--op", tr_op, "fftbr | ifftbr | fwht");
  tr->add_option("--in", tr_in, "Input column file (comma-separated columns)")->required();
  tr->add_option("--out", tr_out, "Output column file");
  tr->add_flag("--complex-input", tr_complex_in, "Treat consecutive column pairs as (re, im)");

  // ---- kernel ----
  auto* kn = app.add_subcommand("kernel", "Fast Gram operations over a generated point set");
  SamplerFlags kn_sampler;
  kn_sampler.attach(kn, /*with_R=*/false);
  KernelFlags kn_kernel;
  kn_kernel.attach(kn);
  std::string kn_op = "matvec", kn_y, kn_weights, kn_out = "kernel_out.csv";
  std::size_t kn_n = 64;
  kn->add_option("--op", kn_op, "matvec | solve | discrepancy | weights");
  kn->add_option("--n", kn_n, "Points (power of 2)");
  kn->add_option("--y", kn_y, "Vector file for matvec/solve");
  kn->add_option("--weights", kn_weights, "Weight file for discrepancy (default: 1/n)");
  kn->add_option("--out", kn_out, "Output file");

  // ---- integrate ----
  auto* it = app.add_subcommand("integrate", "Randomized QMC estimate with a t interval");
  SamplerFlags it_sampler;
  it_sampler.attach(it, /*with_R=*/false);
  std::string it_f, it_expr, it_mode = "fixed", it_out;
  std::size_t it_n = 1024, it_R = 15, it_n0 = 64, it_nmax = std::size_t{1} << 20;
  double it_tau = 0.05, it_tol = 1e-3;
  bool it_baker = false;
  unsigned it_threads = 1;
  it->add_option("--f", it_f, "Catalog integrand name");
  it->add_option("--expr", it_expr, "Integrand expression over x1..xd (+,-,*,/,exp,cos,abs)");
  it->add_option("--mode", it_mode, "fixed | adaptive");
  it->add_option("--n", it_n, "Points per replication (fixed mode)");
  it->add_option("--R", it_R, "Replications");
  it->add_option("--tau", it_tau, "1 - confidence level");
  it->add_option("--tol", it_tol, "Absolute CI half-width target (adaptive; inf allowed)");
  it->add_option("--n0", it_n0, "Starting n (adaptive)");
  it->add_option("--n-max", it_nmax, "Largest n (adaptive)");
  it->add_flag("--baker", it_baker, "Periodize through the tent map");
  it->add_option("--threads", it_threads, "Worker threads over replications");
  it->add_option("--out", it_out, "Append the result record to this CSV");

  // ---- study ----
  auto* st = app.add_subcommand("study", "RMSE convergence study over samplers and sizes");
  std::string st_integrands = "simple-d1", st_samplers = "iid,lattice-baker,dnet-lms-a1";
  unsigned st_mmin = 4, st_mmax = 12;
  std::size_t st_reps = 100;
  std::uint64_t st_seed = 0;
  bool st_seed_set = false;
  std::string st_out = "study.csv";
  unsigned st_threads = 1;
  st->add_option("--integrands", st_integrands, "Comma list of catalog names");
  st->add_option("--samplers", st_samplers,
                 "Comma list: iid | lattice-baker | dnet-lms-a1 | dnet-lms-a2 | halton-nus");
  st->add_option("--m-min", st_mmin, "Smallest log2(n)");
  st->add_option("--m-max", st_mmax, "Largest log2(n)");
  st->add_option("--reps", st_reps, "Randomizations per size");
  auto* ss = st->add_option("--seed", st_seed, "RNG seed");
  ss->each([&](const std::string&) { st_seed_set = true; });
  st->add_option("--out", st_out, "Output CSV (integrand,sampler,n,rmse)");
  st->add_option("--threads", st_threads, "Worker threads over randomizations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // prints help or the parse diagnostic; help exits clean, errors as usage
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  // ---------------- gen ----------------
  if (gen->parsed()) {
    if (gen_format != "csv" && gen_format != "binary")
      throw CLI::ValidationError("--format", "format must be csv or binary");
    auto batch = generate_batch(gen_flags, gen_n);
    std::cout << "config: gen " << gen_flags.echo(gen_n) << " out=" << gen_out
              << " format=" << gen_format << "\n";
    qmc::io::write_point_batch(batch, gen_out,
                               gen_format == "csv" ? qmc::io::BatchFormat::csv
                                                   : qmc::io::BatchFormat::binary);
    json meta = {{"tool", "qmc_cli"},
                 {"version", kVersion},
                 {"seed", batch.seed},
                 {"type", qmc::to_string(batch.generator)},
                 {"d", batch.d},
                 {"n", batch.n},
                 {"R", batch.R},
                 {"order", qmc::to_string(batch.order)},
                 {"rand", qmc::to_string(batch.rand)},
                 {"alpha", batch.interlace_alpha},
                 {"source", batch.source},
                 {"format", gen_format}};
    std::ofstream ms(gen_out + ".meta.json");
    ms << meta.dump(2) << '\n';
    std::cout << "wrote " << batch.R << "x" << batch.n << "x" << batch.d << " batch to "
              << gen_out << "\n";
    return kOk;
  }

  // ---------------- transform ----------------
  if (tr->parsed()) {
    auto cols = read_columns(tr_in);
    std::cout << "config: transform op=" << tr_op << " in=" << tr_in << " out=" << tr_out
              << " columns=" << cols.size() << " rows=" << cols[0].size()
              << " complex-input=" << (tr_complex_in ? 1 : 0) << "\n";
    const std::size_t n = cols[0].size();
    if (!qmc::is_pow2(n)) throw CLI::ValidationError("--in", "column length must be a power of 2");
    if (tr_op == "fwht") {
      for (auto& col : cols) qmc::fwht(std::span<double>(col));
      write_columns(cols, tr_out);
      return kOk;
    }
    if (tr_op != "fftbr" && tr_op != "ifftbr")
      throw CLI::ValidationError("--op", "unknown transform: " + tr_op);
    const bool pairs = tr_complex_in || tr_op == "ifftbr";
    if (pairs && cols.size() % 2 != 0)
      throw CLI::ValidationError("--in", "complex input needs (re, im) column pairs");
    const std::size_t nseq = pairs ? cols.size() / 2 : cols.size();
    std::vector<std::vector<double>> out;
    for (std::size_t q = 0; q < nseq; ++q) {
      std::vector<qmc::cplx> y(n);
      for (std::size_t i = 0; i < n; ++i)
        y[i] = pairs ? qmc::cplx(cols[2 * q][i], cols[2 * q + 1][i]) : qmc::cplx(cols[q][i], 0.0);
      if (tr_op == "fftbr") qmc::fftbr(y);
      else qmc::ifftbr(y);
      std::vector<double> re(n), im(n);
      for (std::size_t i = 0; i < n; ++i) {
        re[i] = y[i].real();
        im[i] = y[i].imag();
      }
      out.push_back(std::move(re));
      out.push_back(std::move(im));
    }
    write_columns(out, tr_out);
    return kOk;
  }

  // ---------------- kernel ----------------
  if (kn->parsed()) {
    kn_sampler.R = 1;
    if (kn_sampler.rand.empty())
      kn_sampler.rand = kn_sampler.type == "lattice" ? "shift" : "digital-shift";
    auto batch = generate_batch(kn_sampler, kn_n);
    auto spec = kn_kernel.resolve(kn_sampler.d);
    std::cout << "config: kernel op=" << kn_op << " " << kn_sampler.echo(kn_n)
              << " family=" << kn_kernel.family << " gamma=" << kn_kernel.gamma << "\n";
    auto G = qmc::gram_build(spec, batch);
    if (kn_op == "matvec" || kn_op == "solve") {
      if (kn_y.empty()) throw CLI::ValidationError("--y", "matvec/solve need --y");
      auto cols = read_columns(kn_y);
      if (cols[0].size() != kn_n) throw CLI::ValidationError("--y", "vector length must equal --n");
      std::vector<std::vector<double>> out;
      for (auto& col : cols)
        out.push_back(kn_op == "matvec" ? qmc::gram_matvec(G, col) : qmc::gram_solve(G, col));
      write_columns(out, kn_out);
      return kOk;
    }
    if (kn_op == "weights") {
      auto w = qmc::optimal_weights(G);
      write_columns({w}, kn_out);
      std::cout.precision(12);
      std::cout << "discrepancy_optimal=" << qmc::discrepancy(G, w) << "\n";
      return kOk;
    }
    if (kn_op == "discrepancy") {
      std::vector<double> w;
      if (kn_weights.empty()) {
        w.assign(kn_n, 1.0 / static_cast<double>(kn_n));
      } else {
        w = read_columns(kn_weights)[0];
        if (w.size() != kn_n)
          throw CLI::ValidationError("--weights", "weight length must equal --n");
      }
      std::cout.precision(12);
      std::cout << "discrepancy=" << qmc::discrepancy(G, w) << "\n";
      return kOk;
    }
    throw CLI::ValidationError("--op", "unknown kernel op: " + kn_op);
  }

  // ---------------- integrate ----------------
  if (it->parsed()) {
    auto spec = it_sampler.resolve();
    qmc::Integrand f;
    if (!it_f.empty()) {
      f = qmc::integrand_library(it_f, it_sampler.d);
    } else if (!it_expr.empty()) {
      try {
        auto parsed = qmc::Expression::parse(it_expr, it_sampler.d);
        f.name = "expr";
        f.d = it_sampler.d;
        f.f = [parsed](std::span<const double> x) { return parsed.eval(x); };
      } catch (const qmc::expr_error& e) {
        std::cerr << "error: " << e.what() << "\n  " << it_expr << "\n  "
                  << std::string(e.position(), ' ') << "^\n";
        return kUsage;
      }
    } else {
      throw CLI::ValidationError("--f", "need --f or --expr");
    }
    std::cout << "config: integrate f=" << f.name << " mode=" << it_mode << " "
              << it_sampler.echo(it_mode == "fixed" ? it_n : it_n0) << " R=" << it_R
              << " tau=" << it_tau << " tol=" << it_tol << " baker=" << (it_baker ? 1 : 0)
              << " threads=" << it_threads << "\n";
    qmc::RqmcResult res;
    if (it_mode == "fixed") {
      res = qmc::rqmc_fixed(f, spec, it_n, it_R, it_tau, it_baker, it_threads);
    } else if (it_mode == "adaptive") {
      res = qmc::rqmc_adaptive(f, spec, it_tau, it_tol, it_n0, it_nmax, it_R, it_baker,
                               it_threads);
    } else {
      throw CLI::ValidationError("--mode", "mode must be fixed or adaptive");
    }
    std::cout.precision(12);
    std::cout << "mu_hat=" << res.mu_hat << " ci_lo=" << res.ci_lo << " ci_hi=" << res.ci_hi
              << " half_width=" << res.half_width() << " sigma_hat=" << res.sigma_hat
              << " n=" << res.n << " R=" << res.R << " level=" << res.level
              << " tolerance_met=" << (res.tolerance_met ? 1 : 0) << "\n";
    if (!it_out.empty()) {
      const bool fresh = !std::ifstream(it_out).good();
      std::ofstream out(it_out, std::ios::app);
      out.precision(17);
      if (fresh) out << "integrand,mode,mu_hat,ci_lo,ci_hi,n,R,seed,tolerance_met\n";
      out << f.name << ',' << it_mode << ',' << res.mu_hat << ',' << res.ci_lo << ','
          << res.ci_hi << ',' << res.n << ',' << res.R << ',' << spec.seed << ','
          << (res.tolerance_met ? 1 : 0) << '\n';
    }
    if (it_mode == "adaptive" && !res.tolerance_met) return kToleranceMiss;
    return kOk;
  }

  // ---------------- study ----------------
  if (st->parsed()) {
    const std::uint64_t seed = st_seed_set ? st_seed : default_seed();
    auto split = [](const std::string& s) {
      std::vector<std::string> out;
      std::istringstream ss(s);
      std::string tok;
      while (std::getline(ss, tok, ',')) out.push_back(tok);
      return out;
    };
    auto sampler_preset = [&](const std::string& name, unsigned d) {
      qmc::SamplerSpec s;
      s.d = d;
      s.seed = seed;
      bool baker = false;
      if (name == "iid") {
        s.type = qmc::Generator::iid;
        s.rand = qmc::RandKind::none;
      } else if (name == "lattice-baker") {
        s.type = qmc::Generator::lattice;
        s.rand = qmc::RandKind::shift;
        baker = true;
      } else if (name == "dnet-lms-a1") {
        s.type = qmc::Generator::dnet;
        s.rand = qmc::RandKind::lms_shift;
        s.alpha = 1;
      } else if (name == "dnet-lms-a2") {
        s.type = qmc::Generator::dnet;
        s.rand = qmc::RandKind::lms_shift;
        s.alpha = 2;
      } else if (name == "halton-nus") {
        s.type = qmc::Generator::halton;
        s.rand = qmc::RandKind::nus;
      } else {
        throw CLI::ValidationError("--samplers", "unknown sampler preset: " + name);
      }
      return std::pair<qmc::SamplerSpec, bool>(s, baker);
    };
    if (st_mmax < st_mmin) throw CLI::ValidationError("--m-max", "need m-max >= m-min");
    std::cout << "config: study integrands=" << st_integrands << " samplers=" << st_samplers
              << " m-min=" << st_mmin << " m-max=" << st_mmax << " reps=" << st_reps
              << " seed=" << seed << " threads=" << st_threads << " out=" << st_out << "\n";
    std::ofstream out(st_out);
    if (!out) throw qmc::parse_error("cannot write " + st_out);
    out << "integrand,sampler,n,rmse\n";
    out.precision(17);
    for (const auto& fname : split(st_integrands)) {
      unsigned d = 1;
      if (fname == "simple-d2" || fname == "oakley") d = 2;
      if (fname == "g-function" || fname == "oscillatory" || fname == "corner-peak") d = 3;
      auto f = qmc::integrand_library(fname, d);
      if (!f.exact_mean) throw CLI::ValidationError("--integrands", fname + " has no exact mean");
      for (const auto& sname : split(st_samplers)) {
        auto [spec, baker] = sampler_preset(sname, d);
        std::vector<double> log_n, log_rmse;
        for (unsigned m = st_mmin; m <= st_mmax; ++m) {
          const std::size_t n = std::size_t{1} << m;
          auto res = qmc::rqmc_fixed(f, spec, n, st_reps, 0.05, baker, st_threads);
          double mse = 0.0;
          for (double mu_r : res.rep_means) {
            const double e = mu_r - *f.exact_mean;
            mse += e * e;
          }
          const double rmse = std::sqrt(mse / static_cast<double>(res.R));
          out << fname << ',' << sname << ',' << n << ',' << rmse << '\n';
          log_n.push_back(std::log2(static_cast<double>(n)));
          log_rmse.push_back(std::log2(rmse > 0 ? rmse : 1e-300));
        }
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double cnt = static_cast<double>(log_n.size());
        for (std::size_t q = 0; q < log_n.size(); ++q) {
          sx += log_n[q];
          sy += log_rmse[q];
          sxx += log_n[q] * log_n[q];
          sxy += log_n[q] * log_rmse[q];
        }
        const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
        std::cout << "slope integrand=" << fname << " sampler=" << sname << " slope=" << slope
                  << "\n";
      }
    }
    return kOk;
  }

  return kUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const qmc::expr_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const qmc::parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const qmc::singular_gram_error& e) {
    std::cerr << "numeric failure: " << e.what() << " (index " << e.index() << ")\n";
    return kNumeric;
  } catch (const qmc::structure_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const qmc::precision_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  }
}
