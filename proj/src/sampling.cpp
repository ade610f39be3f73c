#include "renyi/sampling.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "renyi/parallel.hpp"
#include "renyi/specfun.hpp"

namespace renyi {

nlohmann::ordered_json params_json(const MaximizerParams& p) {
  nlohmann::ordered_json j;
  j["q"] = p.q();
  j["n"] = p.n();
  std::vector<std::vector<double>> c(p.n(), std::vector<double>(p.n()));
  for (int i = 0; i < p.n(); ++i)
    for (int k = 0; k < p.n(); ++k) c[i][k] = p.cov.matrix()(i, k);
  j["cov"] = c;
  return j;
}

void draw_maximizer(const MaximizerParams& p, RandomStream& rng, Eigen::Ref<Vec> out) {
  const int n = p.n();
  Vec z(n);
  for (int i = 0; i < n; ++i) z[i] = rng.normal();
  const Vec lz = p.cov.chol() * z;
  if (p.gaussian()) {
    out = lz;
  } else if (p.bounded()) {
    const double v = chi_sample(ChiParams(p.dof - n), rng);
    out = std::sqrt(p.dof) * lz / std::sqrt(z.squaredNorm() + v * v);
  } else {
    const double u = chi_sample(ChiParams(p.dof), rng);
    out = std::sqrt(p.dof - 2.0) * lz / u;
  }
}

namespace {

template <class Draw>
SampleBatch sample_rows(int n, Eigen::Index count, const RandomStream& rng, Draw draw) {
  if (count < 1) throw InvalidArgument("sample count must be at least 1");
  SampleBatch b;
  b.data.resize(count, n);
  b.seed = rng.seed();
  for_each_chunk(static_cast<std::size_t>(count), kChunkRows, [&](std::size_t chunk, std::size_t lo, std::size_t hi) {
    RandomStream local = rng.substream(chunk);
    Vec row(n);
    for (std::size_t i = lo; i < hi; ++i) {
      draw(local, row);
      b.data.row(static_cast<Eigen::Index>(i)) = row.transpose();
    }
  });
  return b;
}

}  // namespace

SampleBatch sample_maximizer(const MaximizerParams& p, Eigen::Index count, const RandomStream& rng) {
  auto b = sample_rows(p.n(), count, rng, [&](RandomStream& r, Eigen::Ref<Vec> out) { draw_maximizer(p, r, out); });
  std::ostringstream os;
  os << "maximizer q=" << p.q() << " n=" << p.n();
  b.description = os.str();
  b.params = params_json(p);
  return b;
}

SampleBatch sample_density(const Density& d, Eigen::Index count, const RandomStream& rng) {
  auto b = sample_rows(d.dim(), count, rng, [&](RandomStream& r, Eigen::Ref<Vec> out) { d.sample(r, out); });
  b.description = d.describe();
  return b;
}

Vec theta_map(const Covariance& d, const VecRef& x) { return x / std::sqrt(d.quad_form(x) + 1.0); }

Vec theta_inverse(const Covariance& d, const VecRef& y) {
  const double s = d.quad_form(y);
  if (!(s < 1.0)) throw DomainError("theta_inverse: point is not inside the unit ellipsoid");
  return y / std::sqrt(1.0 - s);
}

SampleBatch theta_map(const Covariance& d, const SampleBatch& batch) {
  SampleBatch out = batch;
  for (Eigen::Index i = 0; i < batch.count(); ++i) {
    out.data.row(i) = theta_map(d, batch.data.row(i).transpose()).transpose();
  }
  out.description = "theta(" + batch.description + ")";
  return out;
}

DualParams dualize(const MaximizerParams& p) {
  if (!(p.q() < 1.0)) throw DomainError("dualize: requires q < 1");
  const int n = p.n();
  const double inv = 1.0 / (1.0 - p.q()) - 0.5 * n - 1.0;
  if (!(inv > 0.0)) throw DomainError("dualize: 1/(1-q) - n/2 - 1 must be positive");
  const double m = p.dof;
  const double dual_q = 1.0 + 1.0 / inv;
  return {make_params(QIndex{dual_q, n}, p.cov.scaled((m - 2.0) / (m + n))), p.cov.scaled(m - 2.0)};
}

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  auto s = path;
  s += ".json";
  return s;
}

void write_batch(const SampleBatch& batch, const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  for (Eigen::Index i = 0; i < batch.count(); ++i) {
    for (int j = 0; j < batch.dim(); ++j) {
      std::fprintf(f, j ? ",%.17g" : "%.17g", batch.data(i, j));
    }
    std::fputc('\n', f);
  }
  const bool ok = std::ferror(f) == 0;
  if (std::fclose(f) != 0 || !ok) throw IoError("write failed for " + path.string());

  nlohmann::ordered_json side;
  side["seed"] = batch.seed;
  side["params"] = batch.params;
  side["description"] = batch.description;
  side["count"] = batch.count();
  side["dim"] = batch.dim();
  std::ofstream js(sidecar_path(path));
  if (!js) throw IoError("cannot open " + sidecar_path(path).string() + " for writing");
  js << side.dump(2) << '\n';
  if (!js) throw IoError("write failed for " + sidecar_path(path).string());
}

SampleBatch read_batch(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<double> values;
  int cols = -1;
  Eigen::Index rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    int c = 0;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const std::size_t end = std::min(line.find(',', pos), line.size());
      std::string cell = line.substr(pos, end - pos);
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw InvalidArgument("sample CSV line " + std::to_string(rows + 1) + ": cannot parse '" + cell + "'");
      }
      if (cell.find_first_not_of(" \t\r", used) != std::string::npos || !std::isfinite(v)) {
        throw InvalidArgument("sample CSV line " + std::to_string(rows + 1) + ": bad value '" + cell + "'");
      }
      values.push_back(v);
      ++c;
      pos = end + 1;
    }
    if (cols < 0) cols = c;
    if (c != cols) throw InvalidArgument("sample CSV line " + std::to_string(rows + 1) + ": ragged row");
    ++rows;
  }
  if (rows == 0) throw InvalidArgument("sample CSV " + path.string() + " is empty");
  SampleBatch b;
  b.data = Eigen::Map<RowMat>(values.data(), rows, cols);
  std::ifstream side(sidecar_path(path));
  if (side) {
    try {
      auto j = nlohmann::ordered_json::parse(side);
      b.seed = j.value("seed", std::uint64_t{0});
      b.description = j.value("description", std::string{});
      if (j.contains("params")) b.params = j["params"];
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgument("sidecar " + sidecar_path(path).string() + ": " + e.what());
    }
  }
  return b;
}

}  // namespace renyi
