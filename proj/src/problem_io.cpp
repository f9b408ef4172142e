#include "dirac/problem_io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <variant>
#include <vector>

#include "dirac/errors.hpp"

namespace dirac {

namespace {

using Value = std::variant<double, std::string, bool, std::vector<double>>;

struct Entry {
  Value value;
  int line;
};

struct Table {
  std::map<std::string, Entry> entries;
  int line = 0;
};

struct Document {
  Table root;
  std::map<std::string, Table> tables;
  std::map<std::string, std::vector<Table>> arrays;
};

[[noreturn]] void fail(int line, const std::string& msg) {
  throw Error(ErrorCode::kParse, "parse_problem", "line " + std::to_string(line) + ": " + msg);
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return std::string(line.substr(0, i));
  }
  return std::string(line);
}

double parse_number(std::string_view s, int line) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    fail(line, "expected a number, got '" + std::string(s) + "'");
  return v;
}

Value parse_value(std::string_view s, int line) {
  s = trim(s);
  if (s.empty()) fail(line, "missing value");
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"') fail(line, "unterminated string");
    return std::string(s.substr(1, s.size() - 2));
  }
  if (s == "true") return true;
  if (s == "false") return false;
  if (s.front() == '[') {
    if (s.back() != ']') fail(line, "unterminated array");
    std::vector<double> out;
    std::string_view body = trim(s.substr(1, s.size() - 2));
    while (!body.empty()) {
      const auto comma = body.find(',');
      const auto item = trim(body.substr(0, comma));
      if (item.empty()) {
        if (comma == std::string_view::npos) break;
        fail(line, "empty array element");
      }
      out.push_back(parse_number(item, line));
      if (comma == std::string_view::npos) break;
      body = trim(body.substr(comma + 1));
    }
    return out;
  }
  return parse_number(s, line);
}

int bracket_balance(std::string_view s) {
  int depth = 0;
  bool in_string = false;
  for (char c : s) {
    if (c == '"') in_string = !in_string;
    if (in_string) continue;
    if (c == '[') ++depth;
    if (c == ']') --depth;
  }
  return depth;
}

Document parse_document(std::string_view text) {
  Document doc;
  Table* current = &doc.root;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = strip_comment(raw);
    std::string_view t = trim(line);
    if (t.empty()) continue;
    if (t.substr(0, 2) == "[[") {
      if (t.size() < 4 || t.substr(t.size() - 2) != "]]") fail(line_no, "malformed array-of-tables header");
      const std::string name(trim(t.substr(2, t.size() - 4)));
      auto& vec = doc.arrays[name];
      vec.push_back(Table{{}, line_no});
      current = &vec.back();
      continue;
    }
    if (t.front() == '[') {
      if (t.back() != ']') fail(line_no, "malformed table header");
      const std::string name(trim(t.substr(1, t.size() - 2)));
      if (doc.tables.count(name)) fail(line_no, "duplicate table [" + name + "]");
      current = &doc.tables[name];
      current->line = line_no;
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) fail(line_no, "expected key = value");
    std::string key(trim(t.substr(0, eq)));
    std::string value(trim(t.substr(eq + 1)));
    const int start_line = line_no;
    while (bracket_balance(value) > 0 && std::getline(in, raw)) {
      ++line_no;
      value += " " + std::string(trim(strip_comment(raw)));
    }
    if (bracket_balance(value) != 0) fail(start_line, "unbalanced brackets");
    Table* target = current;
    const auto dot = key.find('.');
    if (dot != std::string::npos) {
      if (current != &doc.root) fail(start_line, "dotted keys are only supported at top level");
      const std::string table = key.substr(0, dot);
      target = &doc.tables[table];
      if (!target->line) target->line = start_line;
      key = key.substr(dot + 1);
    }
    if (target->entries.count(key)) fail(start_line, "duplicate key '" + key + "'");
    target->entries.emplace(key, Entry{parse_value(value, start_line), start_line});
  }
  return doc;
}

class Reader {
 public:
  Reader(const Table& t, std::string where) : t_(t), where_(std::move(where)) {}

  std::optional<double> number(const std::string& key) {
    const Entry* e = take(key);
    if (!e) return std::nullopt;
    if (auto* v = std::get_if<double>(&e->value)) return *v;
    fail(e->line, where_ + key + " must be a number");
  }
  std::optional<std::vector<double>> array(const std::string& key) {
    const Entry* e = take(key);
    if (!e) return std::nullopt;
    if (auto* v = std::get_if<std::vector<double>>(&e->value)) return *v;
    fail(e->line, where_ + key + " must be an array of numbers");
  }
  std::optional<std::string> string(const std::string& key) {
    const Entry* e = take(key);
    if (!e) return std::nullopt;
    if (auto* v = std::get_if<std::string>(&e->value)) return *v;
    fail(e->line, where_ + key + " must be a string");
  }
  int line_of(const std::string& key) const {
    auto it = t_.entries.find(key);
    return it == t_.entries.end() ? t_.line : it->second.line;
  }
  void finish() const {
    for (const auto& [k, e] : t_.entries)
      if (!used_.count(k)) fail(e.line, "unknown key '" + where_ + k + "'");
  }

 private:
  const Entry* take(const std::string& key) {
    auto it = t_.entries.find(key);
    if (it == t_.entries.end()) return nullptr;
    used_[key] = true;
    return &it->second;
  }
  const Table& t_;
  std::string where_;
  std::map<std::string, bool> used_;
};

PotentialPiece read_piece(const Table& t) {
  Reader r(t, "potential.");
  const std::string kind = r.string("kind").value_or("constant");
  PotentialPiece piece;
  if (kind == "zero") {
    piece = PotentialPiece::zero();
  } else if (kind == "constant") {
    piece = PotentialPiece::constant(r.number("p").value_or(0.0), r.number("q").value_or(0.0),
                                     r.number("r").value_or(0.0));
  } else if (kind == "poly") {
    auto poly = [&](const char* key) {
      try {
        return RealPolynomial(r.array(key).value_or(std::vector<double>{}));
      } catch (const std::invalid_argument& e) {
        fail(r.line_of(key), e.what());
      }
    };
    RealPolynomial p = poly("p"), q = poly("q"), rr = poly("r");
    piece = PotentialPiece::poly(std::move(p), std::move(q), std::move(rr));
  } else {
    fail(r.line_of("kind"), "potential kind must be \"zero\", \"constant\" or \"poly\"");
  }
  r.finish();
  return piece;
}

RealPolynomial read_poly(Reader& r, const std::string& key) {
  auto coeffs = r.array(key);
  if (!coeffs) return {};
  try {
    return RealPolynomial(*coeffs);
  } catch (const std::invalid_argument& e) {
    fail(r.line_of(key), e.what());
  }
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

std::string fmt(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s + "]";
}

}  // namespace

DiracProblem parse_problem(std::string_view text) {
  const Document doc = parse_document(text);
  for (const auto& [name, t] : doc.tables)
    if (name != "boundary") fail(t.line, "unknown table [" + name + "]");
  for (const auto& [name, v] : doc.arrays)
    if (name != "transmission" && name != "potential")
      fail(v.front().line, "unknown table array [[" + name + "]]");

  Reader root(doc.root, "");
  const auto interval = root.array("interval");
  if (!interval || interval->size() != 2) fail(root.line_of("interval"), "interval = [a, b] is required");
  const auto weights = root.array("weights");
  if (!weights) fail(1, "weights = [...] is required");
  PotentialSpec potential;
  potential.breaks = root.array("potential_breaks").value_or(std::vector<double>{});
  root.finish();

  BoundaryConditions bc;
  auto bt = doc.tables.find("boundary");
  if (bt == doc.tables.end()) fail(1, "boundary polynomials a1, a2, b1, b2 are required");
  {
    Reader r(bt->second, "boundary.");
    bc.a1 = read_poly(r, "a1");
    bc.a2 = read_poly(r, "a2");
    bc.b1 = read_poly(r, "b1");
    bc.b2 = read_poly(r, "b2");
    r.finish();
  }

  std::vector<TransmissionData> tr;
  if (auto it = doc.arrays.find("transmission"); it != doc.arrays.end()) {
    for (const auto& t : it->second) {
      Reader r(t, "transmission.");
      TransmissionData td;
      const auto xi = r.number("xi");
      if (!xi) fail(t.line, "transmission requires xi");
      td.xi = *xi;
      td.theta = r.number("theta").value_or(1.0);
      td.gamma = read_poly(r, "gamma");
      r.finish();
      tr.push_back(std::move(td));
    }
  }
  if (auto it = doc.arrays.find("potential"); it != doc.arrays.end())
    for (const auto& t : it->second) potential.pieces.push_back(read_piece(t));

  return DiracProblem((*interval)[0], (*interval)[1], *weights, std::move(tr), std::move(bc),
                      std::move(potential));
}

DiracProblem load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "load_problem", "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kIo, "load_problem", "cannot read " + path.string());
  return parse_problem(buf.str());
}

std::string serialize_problem(const DiracProblem& problem) {
  std::ostringstream out;
  out << "interval = " << fmt(std::vector<double>{problem.a(), problem.b()}) << "\n";
  out << "weights = " << fmt(problem.weights()) << "\n";
  if (!problem.potential().breaks.empty())
    out << "potential_breaks = " << fmt(problem.potential().breaks) << "\n";
  const auto& bc = problem.boundary();
  out << "\n[boundary]\n";
  out << "a1 = " << fmt(bc.a1.coeffs()) << "\n";
  out << "a2 = " << fmt(bc.a2.coeffs()) << "\n";
  out << "b1 = " << fmt(bc.b1.coeffs()) << "\n";
  out << "b2 = " << fmt(bc.b2.coeffs()) << "\n";
  for (const auto& t : problem.transmissions()) {
    out << "\n[[transmission]]\n";
    out << "xi = " << fmt(t.xi) << "\n";
    out << "theta = " << fmt(t.theta) << "\n";
    out << "gamma = " << fmt(t.gamma.coeffs()) << "\n";
  }
  for (const auto& piece : problem.potential().pieces) {
    out << "\n[[potential]]\n";
    switch (piece.kind()) {
      case PotentialPiece::Kind::kZero:
        out << "kind = \"zero\"\n";
        break;
      case PotentialPiece::Kind::kConstant:
        out << "kind = \"constant\"\n";
        out << "p = " << fmt(piece.p().coeff(0)) << "\n";
        out << "q = " << fmt(piece.q().coeff(0)) << "\n";
        out << "r = " << fmt(piece.r().coeff(0)) << "\n";
        break;
      case PotentialPiece::Kind::kPoly:
        out << "kind = \"poly\"\n";
        out << "p = " << fmt(piece.p().coeffs()) << "\n";
        out << "q = " << fmt(piece.q().coeffs()) << "\n";
        out << "r = " << fmt(piece.r().coeffs()) << "\n";
        break;
      case PotentialPiece::Kind::kFunction:
        throw std::invalid_argument("serialize_problem: function potentials cannot be written");
    }
  }
  return out.str();
}

void save_problem(const std::filesystem::path& path, const DiracProblem& problem) {
  const std::string text = serialize_problem(problem);
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "save_problem", "cannot open " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "save_problem", "cannot write " + path.string());
}

}  // namespace dirac
