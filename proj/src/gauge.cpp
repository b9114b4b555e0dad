#include "cqc/gauge.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cqc/errors.hpp"

namespace cqc {

namespace {

using nlohmann::json;

constexpr const char* kCircuitSchema = "cqc-circuit-1";
constexpr const char* kDilatedSchema = "cqc-dilated-gate-1";

// V on one qubit of a two-site gate; the first qubit is the most significant.
Eigen::Matrix4cd embed_single(const Eigen::Matrix2cd& v, bool first_qubit) {
  Eigen::Matrix4cd out = Eigen::Matrix4cd::Zero();
  for (long a = 0; a < 2; ++a)
    for (long b = 0; b < 2; ++b)
      for (long c = 0; c < 2; ++c) {
        if (first_qubit)
          out(2 * a + c, 2 * b + c) = v(a, b);
        else
          out(2 * c + a, 2 * c + b) = v(a, b);
      }
  return out;
}

json matrix_to_json(const ComplexTensor& t) {
  json u = json::array();
  for (const cxd& z : t.data()) u.push_back({z.real(), z.imag()});
  return u;
}

std::vector<cxd> matrix_from_json(const json& u, long expect) {
  if (!u.is_array() || static_cast<long>(u.size()) != expect)
    throw ParseError("gate matrix must hold " + std::to_string(expect) +
                     " entries");
  std::vector<cxd> data;
  data.reserve(u.size());
  for (const auto& e : u) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      throw ParseError("matrix entry must be a [re, im] pair");
    data.emplace_back(e[0].get<double>(), e[1].get<double>());
  }
  return data;
}

json parse_checked(const std::string& text, const char* want_schema) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what());  // carries the byte position
  }
  if (!doc.is_object() || !doc.contains("schema") ||
      !doc["schema"].is_string())
    throw ParseError("missing schema field");
  const std::string schema = doc["schema"].get<std::string>();
  if (schema != want_schema)
    throw ParseError("unsupported schema version: " + schema + " (expected " +
                     want_schema + ")");
  return doc;
}

}  // namespace

ComplexTensor haar_unitary(long dim, std::mt19937_64& rng) {
  std::normal_distribution<double> dist;
  Eigen::MatrixXcd m(dim, dim);
  for (long c = 0; c < dim; ++c)
    for (long r = 0; r < dim; ++r) m(r, c) = cxd(dist(rng), dist(rng));
  return ComplexTensor::from_matrix(qr_complete(m));
}

GaugeVariant randomize_gauge(const SequentialCircuit& c, std::uint64_t seed) {
  validate_circuit(c, 1e-10);
  GaugeVariant out{c, seed, {}};
  std::mt19937_64 rng(seed);
  const long nb = c.n_bonds();
  const long n_gates = static_cast<long>(c.gates.size());
  for (long k = 0; k + 1 < n_gates; ++k) {
    const long j1 = k % nb + 1;
    const long j2 = (k + 1) % nb + 1;
    // Shared wire between consecutive gates (j, j+1) and (j2, j2+1).
    long q = 0;
    for (long cand : {j1, j1 + 1})
      if (cand == j2 || cand == j2 + 1) q = cand;
    if (q == 0) continue;
    Eigen::Matrix2cd v = haar_unitary(2, rng).as_matrix(1);
    Eigen::Matrix4cd m1 = out.circuit.gates[static_cast<size_t>(k)].as_matrix(1);
    Eigen::Matrix4cd m2 =
        out.circuit.gates[static_cast<size_t>(k + 1)].as_matrix(1);
    out.circuit.gates[static_cast<size_t>(k)] =
        ComplexTensor::from_matrix(embed_single(v, q == j1) * m1);
    out.circuit.gates[static_cast<size_t>(k + 1)] = ComplexTensor::from_matrix(
        m2 * embed_single(v, q == j2).adjoint());
    out.inserted_gauges.push_back(
        {k / nb + 1, j1, q, ComplexTensor::from_matrix(v)});
  }
  validate_circuit(out.circuit, 1e-10);
  return out;
}

std::string circuit_to_json(const SequentialCircuit& c) {
  json doc;
  doc["schema"] = kCircuitSchema;
  doc["n_sites"] = c.n_sites;
  doc["order"] = c.order;
  json gates = json::array();
  for (long i = 1; i <= c.order; ++i)
    for (long j = 1; j <= c.n_bonds(); ++j)
      gates.push_back(
          {{"layer", i}, {"bond", j}, {"u", matrix_to_json(c.gate(i, j))}});
  doc["gates"] = std::move(gates);
  return doc.dump(2);
}

SequentialCircuit circuit_from_json(const std::string& text) {
  json doc = parse_checked(text, kCircuitSchema);
  if (!doc.contains("n_sites") || !doc.contains("order") ||
      !doc.contains("gates"))
    throw ParseError("circuit document needs n_sites, order, gates");
  SequentialCircuit c;
  c.n_sites = doc["n_sites"].get<long>();
  c.order = doc["order"].get<long>();
  if (c.n_sites < 2 || c.order < 1)
    throw ParseError("n_sites must be >= 2 and order >= 1");
  const long expect = c.order * c.n_bonds();
  if (static_cast<long>(doc["gates"].size()) != expect)
    throw ParseError("expected " + std::to_string(expect) + " gates, found " +
                     std::to_string(doc["gates"].size()));
  c.gates.assign(static_cast<size_t>(expect), ComplexTensor({4, 4}));
  std::vector<bool> seen(static_cast<size_t>(expect), false);
  for (const auto& g : doc["gates"]) {
    if (!g.contains("layer") || !g.contains("bond") || !g.contains("u"))
      throw ParseError("gate entry needs layer, bond, u");
    const long i = g["layer"].get<long>();
    const long j = g["bond"].get<long>();
    if (i < 1 || i > c.order || j < 1 || j > c.n_bonds())
      throw ParseError("gate position (" + std::to_string(i) + ", " +
                       std::to_string(j) + ") out of range");
    const size_t idx = static_cast<size_t>((i - 1) * c.n_bonds() + (j - 1));
    if (seen[idx]) throw ParseError("duplicate gate position");
    seen[idx] = true;
    c.gates[idx] = ComplexTensor({4, 4}, matrix_from_json(g["u"], 16));
  }
  for (bool s : seen)
    if (!s) throw ParseError("missing gate position");
  return c;
}

void export_circuit(const SequentialCircuit& c, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ResourceError("cannot open " + path);
  f << circuit_to_json(c) << "\n";
}

SequentialCircuit import_circuit(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ResourceError("cannot open " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return circuit_from_json(buf.str());
}

std::string dilated_gate_to_json(const DilatedGate& g) {
  json doc;
  doc["schema"] = kDilatedSchema;
  doc["ancilla"] = true;
  doc["scale"] = g.scale;
  doc["seed"] = g.seed;
  doc["dim"] = g.unitary.shape()[0];
  doc["u"] = matrix_to_json(g.unitary);
  return doc.dump(2);
}

DilatedGate dilated_gate_from_json(const std::string& text) {
  json doc = parse_checked(text, kDilatedSchema);
  if (!doc.contains("scale") || !doc.contains("dim") || !doc.contains("u"))
    throw ParseError("dilated gate document needs scale, dim, u");
  const long dim = doc["dim"].get<long>();
  if (dim < 2 || dim % 2 != 0) throw ParseError("dim must be even and >= 2");
  DilatedGate g;
  g.scale = doc["scale"].get<double>();
  g.seed = doc.value("seed", std::uint64_t{0});
  g.unitary = ComplexTensor({dim, dim}, matrix_from_json(doc["u"], dim * dim));
  return g;
}

}  // namespace cqc
