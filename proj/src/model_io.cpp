#include "rsh/model_io.hpp"

#include <fstream>
#include <sstream>

#include "binary_io.hpp"

namespace rsh {

namespace detail {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) fail(ErrorKind::Io, "read failed for '" + path + "'");
  return buf.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) fail(ErrorKind::Io, "write failed for '" + path + "'");
}

}  // namespace detail

std::string save_model(const HashModel& model) {
  detail::ByteWriter w;
  const auto& h = model.hyper();
  w.bytes(kModelMagic);
  w.u32(kModelVersion);
  w.u64(model.subspaces());
  w.u64(model.length());
  w.u64(model.dim());
  w.f64(h.rho);
  w.f64(h.lambda);
  w.f64(h.eta);
  w.u64(h.epochs);
  w.f64(h.tol);
  w.u64(h.seed);
  w.f64(h.eps_min);
  w.u8(model.weights() ? 1 : 0);
  for (const auto& p : model.projections()) {
    const Matrix& m = p.rows();
    for (Eigen::Index i = 0; i < m.size(); ++i) w.f64(m.data()[i]);
  }
  if (model.weights()) {
    for (double t : *model.weights()) w.f64(t);
  }
  return w.take();
}

HashModel load_model(std::string_view bytes) {
  detail::ByteReader r(bytes, "model");
  if (r.bytes(kModelMagic.size()) != kModelMagic) r.error("bad magic");
  const auto version = r.u32();
  if (version != kModelVersion) {
    fail(ErrorKind::Version, "model: unsupported format version " + std::to_string(version) +
                                 " (expected " + std::to_string(kModelVersion) + ")");
  }
  Hyperparams h;
  const auto K = r.u64();
  const auto L = r.u64();
  const auto d = r.u64();
  if (K < 2 || L < 1 || d < 1) r.error("invalid dimensions");
  h.K = K;
  h.L = L;
  h.rho = r.f64();
  h.lambda = r.f64();
  h.eta = r.f64();
  h.epochs = r.u64();
  h.tol = r.f64();
  h.seed = r.u64();
  h.eps_min = r.f64();
  const auto has_weights = r.u8();
  if (has_weights > 1) r.error("has_weights flag must be 0 or 1");

  // Size check up front so a hostile header cannot trigger a huge allocation.
  const std::size_t matrix_bytes = 8 * K * d;
  if (matrix_bytes / 8 / K != d || r.remaining() / matrix_bytes < L) {
    r.error("truncated input (header declares " + std::to_string(L) + " projections of " +
            std::to_string(K) + "x" + std::to_string(d) + ")");
  }

  std::vector<ProjectionMatrix> projections;
  projections.reserve(L);
  for (std::uint64_t l = 0; l < L; ++l) {
    Matrix m(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = r.f64();
    if (!m.allFinite()) r.error("non-finite projection entry");
    projections.emplace_back(std::move(m));
  }
  std::optional<std::vector<double>> weights;
  if (has_weights) {
    weights.emplace(L);
    for (auto& t : *weights) t = r.f64();
  }
  if (r.remaining() != 0) r.error("trailing bytes after model");
  try {
    return HashModel(std::move(projections), std::move(weights), h);
  } catch (const Error& e) {
    r.error(e.what());
  }
}

void save_model_file(const HashModel& model, const std::string& path) {
  detail::write_file(path, save_model(model));
}

HashModel load_model_file(const std::string& path) { return load_model(detail::read_file(path)); }

}  // namespace rsh
