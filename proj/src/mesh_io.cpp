#include "sdg/mesh.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

namespace sdg {

namespace {

struct TokenLine {
  int lineno = 0;
  std::vector<std::string> tokens;
};

// Reads content lines (comments after '#' stripped, blanks skipped).
std::vector<TokenLine> tokenize_file(std::istream& in) {
  std::vector<TokenLine> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    TokenLine tl;
    tl.lineno = lineno;
    std::string tok;
    while (ls >> tok) tl.tokens.push_back(tok);
    if (!tl.tokens.empty()) out.push_back(std::move(tl));
  }
  return out;
}

[[noreturn]] void parse_fail(const std::string& path, int lineno, const std::string& msg) {
  std::ostringstream os;
  os << path << ":" << lineno << ": " << msg;
  throw MeshError(os.str());
}

long parse_int(const std::string& path, int lineno, const std::string& tok) {
  long value = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    parse_fail(path, lineno, "expected an integer, got '" + tok + "'");
  return value;
}

double parse_double(const std::string& path, int lineno, const std::string& tok) {
  try {
    std::size_t pos = 0;
    const double value = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return value;
  } catch (const std::exception&) {
    parse_fail(path, lineno, "expected a number, got '" + tok + "'");
  }
}

}  // namespace

PrimalMesh read_polygon_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file: " + path);
  const std::vector<TokenLine> lines = tokenize_file(in);
  if (lines.empty()) throw MeshError(path + ": empty mesh file");

  std::size_t cursor = 0;
  auto next_line = [&](const char* what) -> const TokenLine& {
    if (cursor >= lines.size()) {
      const int last = lines.empty() ? 1 : lines.back().lineno;
      parse_fail(path, last, std::string("unexpected end of file, expected ") + what);
    }
    return lines[cursor++];
  };

  const TokenLine& header = next_line("'nv np' header");
  if (header.tokens.size() != 2)
    parse_fail(path, header.lineno, "expected header 'nv np' with 2 fields");
  const long nv = parse_int(path, header.lineno, header.tokens[0]);
  const long np = parse_int(path, header.lineno, header.tokens[1]);
  if (nv < 3 || np < 1) parse_fail(path, header.lineno, "need nv >= 3 and np >= 1");

  PrimalMesh mesh;
  mesh.vertices.reserve(nv);
  for (long v = 0; v < nv; ++v) {
    const TokenLine& tl = next_line("a vertex line 'x y'");
    if (tl.tokens.size() != 2) parse_fail(path, tl.lineno, "expected vertex line 'x y'");
    mesh.vertices.emplace_back(parse_double(path, tl.lineno, tl.tokens[0]),
                               parse_double(path, tl.lineno, tl.tokens[1]));
  }
  mesh.polygons.reserve(np);
  for (long p = 0; p < np; ++p) {
    const TokenLine& tl = next_line("a polygon line 'm i1 ... im'");
    const long m = parse_int(path, tl.lineno, tl.tokens[0]);
    if (m < 3) parse_fail(path, tl.lineno, "polygon must have at least 3 vertices");
    if (static_cast<long>(tl.tokens.size()) != m + 1)
      parse_fail(path, tl.lineno, "polygon line announces " + std::to_string(m) +
                                      " vertices but lists " +
                                      std::to_string(tl.tokens.size() - 1));
    std::vector<int> cyc;
    cyc.reserve(m);
    for (long i = 1; i <= m; ++i) {
      const long idx = parse_int(path, tl.lineno, tl.tokens[i]);
      if (idx < 0 || idx >= nv)
        parse_fail(path, tl.lineno, "vertex index " + std::to_string(idx) + " out of range");
      cyc.push_back(static_cast<int>(idx));
    }
    mesh.polygons.push_back(std::move(cyc));
  }
  if (cursor != lines.size())
    parse_fail(path, lines[cursor].lineno, "trailing content after the last polygon");

  mesh.update_bbox();
  try {
    validate_primal_mesh(mesh);
  } catch (const MeshError& err) {
    throw MeshError(path + ": " + err.what());
  }
  return mesh;
}

void write_polygon_mesh(const PrimalMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw MeshError("cannot open file for writing: " + path);
  out << std::setprecision(17);
  out << mesh.vertices.size() << " " << mesh.polygons.size() << "\n";
  for (const Vec2& v : mesh.vertices) out << v.x() << " " << v.y() << "\n";
  for (const std::vector<int>& cyc : mesh.polygons) {
    out << cyc.size();
    for (int idx : cyc) out << " " << idx;
    out << "\n";
  }
  if (!out) throw MeshError("failed writing mesh file: " + path);
}

}  // namespace sdg
