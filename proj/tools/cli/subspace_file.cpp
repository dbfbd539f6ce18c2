#include "cli/subspace_file.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "subavg/errors.hpp"

namespace subavg::cli {

using nlohmann::json;

namespace {

const json& field(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(path + key + ": missing field");
  return *it;
}

Index positive_index(const json& obj, const char* key) {
  const json& v = field(obj, key, "");
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw ParseError(std::string(key) + ": expected a positive integer");
  }
  return static_cast<Index>(v.get<long long>());
}

double number(const json& entry, const char* key, const std::string& path) {
  const json& v = field(entry, key, path + ".");
  if (!v.is_number()) throw ParseError(path + "." + key + ": expected a number");
  return v.get<double>();
}

}  // namespace

SubspaceFile parse_subspace_file(const std::string& text, bool repair) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("document: expected a JSON object");

  const json& version = field(doc, "version", "");
  if (!version.is_string() || version.get<std::string>() != "1") {
    throw ParseError("version: expected the string \"1\"");
  }

  SubspaceFile file;
  file.n = positive_index(doc, "n");
  file.m = positive_index(doc, "m");
  const Index count = positive_index(doc, "count");
  if (file.m > file.n) throw ParseError("m: must not exceed n");

  const json& bases = field(doc, "bases", "");
  if (!bases.is_array()) throw ParseError("bases: expected an array");
  if (static_cast<Index>(bases.size()) != count) {
    throw ParseError("bases: expected " + std::to_string(count) + " entries (count), found " +
                     std::to_string(bases.size()));
  }

  for (std::size_t b = 0; b < bases.size(); ++b) {
    const std::string bpath = "bases[" + std::to_string(b) + "]";
    const json& rows = bases[b];
    if (!rows.is_array() || static_cast<Index>(rows.size()) != file.n) {
      throw ParseError(bpath + ": expected " + std::to_string(file.n) + " rows");
    }
    ComplexMatrix x(file.n, file.m);
    for (Index r = 0; r < file.n; ++r) {
      const std::string rpath = bpath + "[" + std::to_string(r) + "]";
      const json& row = rows[static_cast<std::size_t>(r)];
      if (!row.is_array() || static_cast<Index>(row.size()) != file.m) {
        throw ParseError(rpath + ": expected " + std::to_string(file.m) + " entries");
      }
      for (Index c = 0; c < file.m; ++c) {
        const std::string epath = rpath + "[" + std::to_string(c) + "]";
        const json& entry = row[static_cast<std::size_t>(c)];
        if (!entry.is_object()) throw ParseError(epath + ": expected an {re, im} object");
        x(r, c) = Complex(number(entry, "re", epath), number(entry, "im", epath));
      }
    }
    const double err =
        (x.adjoint() * x - ComplexMatrix::Identity(file.m, file.m)).norm();
    if (!(err < kLoadTolerance)) {
      if (!repair) {
        throw ParseError(bpath + ": columns are not orthonormal (||X^H X - I||_F = " +
                         std::to_string(err) + "); pass --repair to re-orthonormalize");
      }
      try {
        x = StiefelBasis::orthonormalize(x).matrix();
      } catch (const InvalidInput& e) {
        throw ParseError(bpath + ": cannot repair: " + e.what());
      }
    }
    file.bases.push_back(std::move(x));
  }
  return file;
}

SubspaceFile read_subspace_file(const std::string& path, bool repair) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_subspace_file(ss.str(), repair);
}

std::string format_subspace_file(const SubspaceFile& file) {
  json bases = json::array();
  for (const auto& x : file.bases) {
    json rows = json::array();
    for (Index r = 0; r < x.rows(); ++r) {
      json row = json::array();
      for (Index c = 0; c < x.cols(); ++c) {
        row.push_back({{"re", x(r, c).real()}, {"im", x(r, c).imag()}});
      }
      rows.push_back(std::move(row));
    }
    bases.push_back(std::move(rows));
  }
  json doc = {{"version", "1"},
              {"n", file.n},
              {"m", file.m},
              {"count", file.bases.size()},
              {"bases", std::move(bases)}};
  return doc.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << contents;
  if (!out) throw std::runtime_error(path + ": write failed");
}

StiefelBasis to_stiefel(const ComplexMatrix& basis) {
  const Index m = basis.cols();
  const double err = (basis.adjoint() * basis - ComplexMatrix::Identity(m, m)).norm();
  if (err < StiefelBasis::kOrthonormalityTolerance) return StiefelBasis(basis);
  return StiefelBasis::orthonormalize(basis);
}

}  // namespace subavg::cli
