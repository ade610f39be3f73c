// Command-line front end: density, sample, entropy, convolve, verify.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or parameter
// error, 3 I/O error. Primary output goes to stdout, diagnostics to stderr.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "renyi/convolve.hpp"
#include "renyi/divergence.hpp"
#include "renyi/maximizer.hpp"
#include "renyi/parallel.hpp"
#include "renyi/quadrature.hpp"
#include "renyi/sampling.hpp"
#include "renyi/stats.hpp"
#include "renyi/verify.hpp"

namespace {

using renyi::Json;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct Common {
  std::optional<double> q;
  std::optional<int> n;
  std::string cov_path;
  std::uint64_t seed = 0;
  std::optional<long long> count;
  std::string out;
  std::string format = "csv";
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Covariance from --cov, or the identity of dimension --n (default 1).
renyi::Covariance resolve_cov(const Common& c) {
  if (!c.cov_path.empty()) {
    auto cov = renyi::read_covariance_csv(c.cov_path);
    if (c.n && *c.n != cov.dim()) {
      throw renyi::InvalidArgument("--n " + std::to_string(*c.n) + " does not match the " +
                                   std::to_string(cov.dim()) + "x" + std::to_string(cov.dim()) + " covariance");
    }
    return cov;
  }
  const int n = c.n.value_or(1);
  if (n < 1) throw renyi::InvalidArgument("--n must be at least 1");
  return renyi::Covariance::identity(n);
}

renyi::MaximizerParams resolve_params(const Common& c) {
  if (!c.q) throw renyi::InvalidArgument("--q is required");
  const auto cov = resolve_cov(c);
  return renyi::make_params(renyi::QIndex{*c.q, cov.dim()}, cov);
}

std::vector<double> parse_point(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(cell, &used);
    } catch (const std::exception&) {
      throw renyi::InvalidArgument("cannot parse x value '" + text + "'");
    }
    if (used != cell.size()) throw renyi::InvalidArgument("cannot parse x value '" + text + "'");
    v.push_back(x);
  }
  return v;
}

void emit(const Json& j, const std::string& out) {
  const std::string text = j.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f || !(f << text)) throw renyi::IoError("cannot write " + out);
}

int cmd_density(const Common& c, const std::vector<std::string>& xs) {
  const auto p = resolve_params(c);
  if (xs.empty()) throw renyi::InvalidArgument("--x is required (one point per flag, coordinates comma-separated)");
  Json rows = Json::array();
  std::ostringstream csv;
  for (const auto& text : xs) {
    const auto v = parse_point(text);
    if (static_cast<int>(v.size()) != p.n()) {
      throw renyi::InvalidArgument("point '" + text + "' has " + std::to_string(v.size()) +
                                   " coordinates, expected n = " + std::to_string(p.n()));
    }
    const renyi::Vec x = Eigen::Map<const renyi::Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
    const double g = renyi::density(p, x);
    rows.push_back({{"x", v}, {"density", g}});
    for (double xi : v) csv << fmt(xi) << ',';
    csv << fmt(g) << '\n';
  }
  if (c.format == "json") {
    emit(Json{{"params", renyi::params_json(p)}, {"rows", rows}}, c.out);
  } else if (c.out.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream f(c.out);
    if (!f || !(f << csv.str())) throw renyi::IoError("cannot write " + c.out);
  }
  return kExitPass;
}

int cmd_sample(const Common& c) {
  const auto p = resolve_params(c);
  const long long count = c.count.value_or(1000);
  if (count < 1) throw renyi::InvalidArgument("--count must be positive");
  if (c.out.empty()) throw renyi::InvalidArgument("--out is required");
  const auto batch = renyi::sample_maximizer(p, count, renyi::RandomStream(c.seed));
  if (c.format == "json") {
    Json j;
    j["seed"] = batch.seed;
    j["params"] = batch.params;
    j["description"] = batch.description;
    j["count"] = batch.count();
    j["dim"] = batch.dim();
    Json data = Json::array();
    for (Eigen::Index i = 0; i < batch.count(); ++i) {
      Json row = Json::array();
      for (int k = 0; k < batch.dim(); ++k) row.push_back(batch.data(i, k));
      data.push_back(row);
    }
    j["data"] = data;
    emit(j, c.out);
  } else {
    renyi::write_batch(batch, c.out);
  }
  return kExitPass;
}

int cmd_entropy(const Common& c) {
  const auto p = resolve_params(c);
  const long long count = c.count.value_or(100000);
  if (count < 2) throw renyi::InvalidArgument("--count must be at least 2");
  const renyi::MaximizerDensity g(p);
  const auto mc = renyi::shannon_entropy_mc(g, count, renyi::RandomStream(c.seed));
  Json j;
  j["params"] = renyi::params_json(p);
  j["H_q_closed"] = renyi::renyi_entropy(p);
  if (p.q() <= 1.0) j["H1_closed"] = renyi::shannon_entropy(p);
  j["H1_mc"] = mc.value;
  j["stderr"] = mc.std_error;
  j["seed"] = c.seed;
  j["count"] = count;
  emit(j, c.out);
  return kExitPass;
}

renyi::Covariance batch_cov(const std::string& path, const renyi::SampleBatch& b) {
  if (!path.empty()) return renyi::read_covariance_csv(path);
  try {
    return renyi::Covariance(renyi::sample_moments(b.data).cov);
  } catch (const renyi::InvalidArgument&) {
    throw renyi::InvalidArgument("sample covariance is singular; pass --cov-s/--cov-t");
  }
}

int cmd_convolve(const Common& c, const std::string& fs, const std::string& ft, const std::string& cs_path,
                 const std::string& ct_path) {
  if (!c.q) throw renyi::InvalidArgument("--q is required");
  if (c.out.empty()) throw renyi::InvalidArgument("--out is required");
  const auto s = renyi::read_batch(fs);
  const auto t = renyi::read_batch(ft);
  if (s.count() != t.count()) {
    throw renyi::InvalidArgument("sample counts differ: " + std::to_string(s.count()) + " vs " +
                                 std::to_string(t.count()));
  }
  if (s.dim() != t.dim()) throw renyi::InvalidArgument("sample dimensions differ");
  const auto cs = batch_cov(cs_path, s);
  const auto ct = batch_cov(ct_path, t);
  if (cs.dim() != s.dim() || ct.dim() != t.dim()) {
    throw renyi::InvalidArgument("covariance dimension does not match the samples");
  }
  const auto spec = renyi::make_convolution_spec(*c.q, cs, ct);
  auto out = renyi::convolve(spec, s, t, renyi::RandomStream(c.seed));
  renyi::write_batch(out, c.out);
  return kExitPass;
}

void write_report(const std::filesystem::path& dir, const std::string& name, const Json& j) {
  std::ofstream f(dir / (name + ".json"));
  if (!f || !(f << j.dump(2) << "\n")) throw renyi::IoError("cannot write " + (dir / (name + ".json")).string());
}

int cmd_verify(const Common& c, const std::string& claim, const std::string& tol_file, const std::string& mu,
               const std::string& constant) {
  renyi::ScenarioConfig cfg;
  cfg.seed = c.seed;
  cfg.count = c.count;
  cfg.q = c.q;
  cfg.n = c.n;
  cfg.mu = mu == "statement" ? renyi::MuVariant::Statement : renyi::MuVariant::Proof;
  cfg.debruijn = constant == "stated" ? renyi::DebruijnConstant::Stated : renyi::DebruijnConstant::Corrected;
  cfg.tolerances = tol_file.empty() ? renyi::default_tolerances() : renyi::load_tolerances(tol_file);

  std::optional<std::filesystem::path> dir;
  if (!c.out.empty()) {
    dir = c.out;
    std::error_code ec;
    std::filesystem::create_directories(*dir, ec);
    if (ec) throw renyi::IoError("cannot create " + c.out + ": " + ec.message());
  }
  if (claim == "all") {
    const auto result = renyi::run_all(cfg);
    if (dir) {
      for (const auto& r : result.reports) write_report(*dir, r.claim_id, r.to_json());
      write_report(*dir, "summary", result.summary);
    }
    std::cout << result.summary.dump(2) << "\n";
    for (const auto& r : result.reports) {
      if (!r.pass) std::cerr << "FAIL " << r.claim_id << "\n";
    }
    return result.all_pass ? kExitPass : kExitFail;
  }
  const auto rep = renyi::run_scenario(claim, cfg);
  const Json j = rep.to_json();
  if (dir) write_report(*dir, rep.claim_id, j);
  std::cout << j.dump(2) << "\n";
  if (!rep.pass) std::cerr << "FAIL " << rep.claim_id << "\n";
  return rep.pass ? kExitPass : kExitFail;
}

std::string claims_help() {
  std::ostringstream os;
  os << "Claims:\n";
  for (const auto& c : renyi::registered_claims()) os << "  " << c.id << "\n      " << c.statement << "\n";
  os << "  all\n      Every claim above; summary on stdout.\n";
  return os.str();
}

void add_model_flags(CLI::App* cmd, Common& c) {
  cmd->add_option("--q", c.q, "Entropy index q (q > n/(n+2))");
  cmd->add_option("--n", c.n, "Dimension (default: from --cov, else 1)");
  cmd->add_option("--cov", c.cov_path, "Covariance matrix as CSV (n rows of n values)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Renyi entropy maximizers: densities, sampling, convolutions and verification."};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker thread cap (0 = all cores)");

  Common c;
  std::vector<std::string> xs;
  std::string file_s, file_t, cov_s, cov_t, claim, tol_file, mu = "proof", constant = "corrected";

  auto* density = app.add_subcommand("density", "Print the maximizer density at the given points");
  add_model_flags(density, c);
  density->add_option("--x", xs, "Point, comma-separated coordinates (repeatable)");
  density->add_option("--out", c.out, "Output file (default stdout)");
  density->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  auto* sample = app.add_subcommand("sample", "Draw samples of the maximizer");
  add_model_flags(sample, c);
  sample->add_option("--seed", c.seed, "Random seed");
  sample->add_option("--count", c.count, "Number of samples (default 1000)");
  sample->add_option("--out", c.out, "Output CSV (a JSON sidecar is written next to it)");
  sample->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  auto* entropy = app.add_subcommand("entropy", "Closed-form q-entropy and Shannon entropy of the maximizer");
  add_model_flags(entropy, c);
  entropy->add_option("--seed", c.seed, "Random seed for the Monte Carlo estimate");
  entropy->add_option("--count", c.count, "Monte Carlo sample size (default 100000)");
  entropy->add_option("--out", c.out, "Output file (default stdout)");
  entropy->add_option("--format", c.format, "json only")->check(CLI::IsMember({"csv", "json"}));

  auto* conv = app.add_subcommand("convolve", "Star (q > 1) or circle (q < 1) convolution of two sample files");
  conv->add_option("--q", c.q, "Entropy index q");
  conv->add_option("S", file_s, "First sample CSV")->required();
  conv->add_option("T", file_t, "Second sample CSV")->required();
  conv->add_option("--cov-s", cov_s, "Covariance CSV of S (default: sample covariance)");
  conv->add_option("--cov-t", cov_t, "Covariance CSV of T (default: sample covariance)");
  conv->add_option("--seed", c.seed, "Random seed");
  conv->add_option("--out", c.out, "Output CSV");
  conv->add_option("--format", c.format, "csv only")->check(CLI::IsMember({"csv"}));

  auto* verify = app.add_subcommand("verify", "Run a verification scenario, or all of them");
  verify->add_option("claim", claim, "Claim id or 'all'")->required();
  verify->add_option("--seed", c.seed, "Random seed");
  verify->add_option("--count", c.count, "Monte Carlo sample size override");
  verify->add_option("--q", c.q, "Index override for single-case scenarios");
  verify->add_option("--n", c.n, "Dimension override for single-case scenarios");
  verify->add_option("--out", c.out, "Directory for <claim>.json reports (and summary.json)");
  verify->add_option("--format", c.format, "json only")->check(CLI::IsMember({"csv", "json"}));
  verify->add_option("--tolerance-file", tol_file, "JSON merged over the built-in tolerances");
  verify->add_option("--mu-variant", mu, "Heat-family exponent: proof or statement")
      ->check(CLI::IsMember({"proof", "statement"}));
  verify->add_option("--debruijn-constant", constant, "Entropy-rate constant: corrected (q^2) or stated (q(q-1))")
      ->check(CLI::IsMember({"corrected", "stated"}));
  verify->footer(claims_help());

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    renyi::set_thread_limit(threads);
    if (*density) return cmd_density(c, xs);
    if (*sample) return cmd_sample(c);
    if (*entropy) return cmd_entropy(c);
    if (*conv) return cmd_convolve(c, file_s, file_t, cov_s, cov_t);
    if (*verify) return cmd_verify(c, claim, tol_file, mu, constant);
  } catch (const renyi::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const renyi::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const renyi::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
  return kExitUsage;
}
