#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <variant>

#include "dirac/asymptotics.hpp"
#include "dirac/errors.hpp"
#include "dirac/problem_io.hpp"
#include "dirac/reconstruct.hpp"
#include "dirac/spectrum.hpp"
#include "dirac/weyl.hpp"

namespace dirac::cli {

namespace {

using Cell = std::variant<double, long long, std::string, std::vector<double>>;

struct Report {
  std::string command;
  std::vector<std::pair<std::string, Cell>> summary;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string number(double v, bool json) {
  if (std::isnan(v)) return json ? "null" : "nan";
  if (std::isinf(v)) return json ? "null" : (v > 0 ? "inf" : "-inf");
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

std::string render(const Cell& c, bool json) {
  if (auto* d = std::get_if<double>(&c)) return number(*d, json);
  if (auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  if (auto* s = std::get_if<std::string>(&c)) return json ? nlohmann::json(*s).dump() : *s;
  const auto& v = std::get<std::vector<double>>(c);
  std::string out = json ? "[" : "";
  for (std::size_t k = 0; k < v.size(); ++k) out += (k ? (json ? ", " : " ") : "") + number(v[k], json);
  return json ? out + "]" : out;
}

void write_csv(const Report& r, std::ostream& out) {
  out << "# command = " << r.command << "\n";
  for (const auto& [k, v] : r.summary) out << "# " << k << " = " << render(v, false) << "\n";
  for (std::size_t c = 0; c < r.columns.size(); ++c) out << (c ? "," : "") << r.columns[c];
  out << "\n";
  for (const auto& row : r.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << render(row[c], false);
    out << "\n";
  }
}

void write_json(const Report& r, std::ostream& out) {
  out << "{\n  \"command\": " << nlohmann::json(r.command).dump() << ",\n  \"summary\": {";
  for (std::size_t k = 0; k < r.summary.size(); ++k)
    out << (k ? ", " : "") << nlohmann::json(r.summary[k].first).dump() << ": "
        << render(r.summary[k].second, true);
  out << "},\n  \"columns\": [";
  for (std::size_t c = 0; c < r.columns.size(); ++c)
    out << (c ? ", " : "") << nlohmann::json(r.columns[c]).dump();
  out << "],\n  \"rows\": [";
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    out << (i ? ",\n    [" : "\n    [");
    for (std::size_t c = 0; c < r.rows[i].size(); ++c) out << (c ? ", " : "") << render(r.rows[i][c], true);
    out << "]";
  }
  out << (r.rows.empty() ? "]\n}\n" : "\n  ]\n}\n");
}

std::pair<double, double> require_window(const RunConfig& c) {
  if (!c.window) throw std::invalid_argument(c.command + " requires --window <min> <max>");
  if (!(c.window->first < c.window->second)) throw std::invalid_argument("window must satisfy min < max");
  return *c.window;
}

std::pair<double, double> window_or(const RunConfig& c, double lo, double hi) {
  return c.window ? require_window(c) : std::pair{lo, hi};
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 2) throw std::invalid_argument("--grid must be at least 2");
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) v[static_cast<std::size_t>(k)] = k + 1 == n ? hi : lo + (hi - lo) * k / (n - 1);
  return v;
}

DiracProblem load_valid(const std::string& path) {
  if (path.empty()) throw std::invalid_argument("--problem is required");
  DiracProblem p = load_problem(path);
  p.require_valid("validate");
  return p;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot read " + what + " '" + s + "'");
  }
  if (used != s.size()) throw std::invalid_argument("cannot read " + what + " '" + s + "'");
  return v;
}

// Eigenvalue column of a `spectrum` output file, CSV or JSON.
std::vector<double> read_targets(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "read_targets", "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  std::vector<double> out;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
      const auto& cols = j.at("columns");
      std::size_t col = cols.size();
      for (std::size_t c = 0; c < cols.size(); ++c)
        if (cols[c] == "eigenvalue") col = c;
      if (col == cols.size()) throw Error(ErrorCode::kParse, "read_targets", "no eigenvalue column in " + path);
      for (const auto& row : j.at("rows")) out.push_back(row.at(col).get<double>());
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParse, "read_targets", path + ": " + e.what());
    }
    return out;
  }
  std::istringstream lines(text);
  std::string line;
  std::size_t col = std::string::npos;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split(line, ',');
    if (col == std::string::npos) {
      for (std::size_t c = 0; c < cells.size(); ++c)
        if (cells[c] == "eigenvalue") col = c;
      if (col == std::string::npos)
        throw Error(ErrorCode::kParse, "read_targets", "no eigenvalue column in " + path);
      continue;
    }
    if (col >= cells.size()) throw Error(ErrorCode::kParse, "read_targets", "short row in " + path);
    try {
      out.push_back(to_double(cells[col], "eigenvalue"));
    } catch (const std::invalid_argument& e) {
      throw Error(ErrorCode::kParse, "read_targets", e.what());
    }
  }
  return out;
}

FitParameter parse_parameter(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0)
    throw std::invalid_argument("--param must look like name=slot[,slot]:lower:upper");
  FitParameter p;
  p.name = text.substr(0, eq);
  const auto parts = split(text.substr(eq + 1), ':');
  if (parts.size() != 3) throw std::invalid_argument("--param must look like name=slot[,slot]:lower:upper");
  for (const auto& slot : split(parts[0], ',')) {
    ParameterSlot s;
    std::string digits;
    if (slot.rfind("theta", 0) == 0) {
      s.kind = ParameterSlot::Kind::kTheta;
      digits = slot.substr(5);
    } else if (!slot.empty() && (slot[0] == 'p' || slot[0] == 'q' || slot[0] == 'r')) {
      s.kind = slot[0] == 'p' ? ParameterSlot::Kind::kP
                              : slot[0] == 'q' ? ParameterSlot::Kind::kQ : ParameterSlot::Kind::kR;
      digits = slot.substr(1);
    } else {
      throw std::invalid_argument("unknown parameter slot '" + slot + "'");
    }
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
      throw std::invalid_argument("parameter slot '" + slot + "' needs an index");
    s.index = std::stoi(digits);
    // theta is numbered from 1 like the transmission points.
    if (s.kind == ParameterSlot::Kind::kTheta) s.index -= 1;
    p.slots.push_back(s);
  }
  p.lower = to_double(parts[1], "lower bound");
  p.upper = to_double(parts[2], "upper bound");
  return p;
}

Report cmd_validate(const RunConfig& c, std::ostream& err, bool& ok) {
  if (c.problem_path.empty()) throw std::invalid_argument("--problem is required");
  const DiracProblem p = load_problem(c.problem_path);
  Report r{"validate", {}, {"failure"}, {}};
  for (const auto& f : p.report().failures) {
    r.rows.push_back({f});
    err << "validation failure: " << f << "\n";
  }
  ok = p.valid();
  r.summary.emplace_back("valid", std::string(ok ? "true" : "false"));
  if (ok) {
    r.summary.emplace_back("transmissions", static_cast<long long>(p.n()));
    r.summary.emplace_back("total_length", total_length(p));
  }
  return r;
}

Report cmd_scan(const RunConfig& c, std::ostream& err) {
  const DiracProblem p = load_valid(c.problem_path);
  const auto [lo, hi] = require_window(c);
  std::optional<LeadingTerm> lead;
  try {
    lead = delta_leading_term(p);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDegenerateLeadingCoefficient) throw;
    err << "note: " << e.what() << "; leading column left empty\n";
  }
  Report r{"scan", {}, {"lambda", "delta_re", "delta_im", "leading"}, {}};
  for (double x : linspace(lo, hi, c.grid)) {
    const Complex d = delta(p, x);
    r.rows.push_back({x, d.real(), d.imag(), lead ? (*lead)(x).real() : kNaN});
  }
  return r;
}

Report cmd_spectrum(const RunConfig& c, std::ostream& err) {
  const DiracProblem p = load_valid(c.problem_path);
  const auto [lo, hi] = require_window(c);
  SpectrumOptions opts;
  opts.tol = c.tol;
  opts.with_norming = true;
  const SpectrumResult s = c.auxiliary ? find_auxiliary_eigenvalues(p, lo, hi, opts)
                                       : find_eigenvalues(p, lo, hi, opts);
  Report r{"spectrum", {}, {"index", "eigenvalue", "residual", "bracket_lo", "bracket_hi", "norming"}, {}};
  r.summary.emplace_back("problem", std::string(c.auxiliary ? "auxiliary" : "main"));
  r.summary.emplace_back("count", static_cast<long long>(s.eigenvalues.size()));
  r.summary.emplace_back("suspected", s.suspected);
  for (double x : s.suspected) err << "note: suspected multiple zero near " << number(x, false) << "\n";
  for (std::size_t k = 0; k < s.eigenvalues.size(); ++k)
    r.rows.push_back({static_cast<long long>(k), s.eigenvalues[k], s.residuals[k], s.brackets[k].lo,
                      s.brackets[k].hi, s.norming[k]});
  return r;
}

Report cmd_asympt(const RunConfig& c) {
  const DiracProblem p = load_valid(c.problem_path);
  const auto [lo, hi] = require_window(c);
  const LeadingTerm lead = delta_leading_term(p);
  const auto grid = linspace(lo, hi, c.grid);
  const AsymptoticsReport rep = compare_asymptotics(p, grid);
  Report r{"asympt", {}, {"lambda", "delta", "leading", "oscillator", "deviation", "admissible"}, {}};
  r.summary.emplace_back("max_deviation", rep.max_deviation);
  r.summary.emplace_back("window_edges", rep.window_edges);
  r.summary.emplace_back("window_max", rep.window_max);
  r.summary.emplace_back("nonincreasing", std::string(rep.nonincreasing ? "true" : "false"));
  for (std::size_t i = 0; i < grid.size(); ++i)
    r.rows.push_back({grid[i], delta(p, grid[i]).real(), lead(grid[i]).real(), rep.oscillator[i],
                      rep.deviation[i], static_cast<long long>(rep.admissible[i])});
  return r;
}

Report cmd_weyl(const RunConfig& c) {
  const DiracProblem p = load_valid(c.problem_path);
  std::optional<DiracProblem> q;
  if (!c.problem2_path.empty()) q = load_valid(c.problem2_path);
  const auto [lo, hi] = require_window(c);
  const auto grid = linspace(lo, hi, c.grid);
  Report r{"weyl", {}, {"lambda", "m_re", "m_im"}, {}};
  if (q) {
    r.columns.push_back("m2_re");
    r.columns.push_back("m2_im");
  }
  auto m_or_nan = [](const DiracProblem& pr, double x) {
    try {
      return weyl_m(pr, x);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kPoleAtEigenvalue) throw;
      return Complex(kNaN, kNaN);
    }
  };
  for (double x : grid) {
    const Complex m = m_or_nan(p, x);
    std::vector<Cell> row{x, m.real(), m.imag()};
    if (q) {
      const Complex m2 = m_or_nan(*q, x);
      row.emplace_back(m2.real());
      row.emplace_back(m2.imag());
    }
    r.rows.push_back(std::move(row));
  }
  if (q) {
    const std::vector<Complex> cgrid(grid.begin(), grid.end());
    const WeylDistance d = weyl_distance(p, *q, cgrid);
    r.summary.emplace_back("distance", d.distance);
    r.summary.emplace_back("dropped", static_cast<long long>(d.dropped.size()));
  }
  return r;
}

Report cmd_pmatrix(const RunConfig& c) {
  const DiracProblem p = load_valid(c.problem_path);
  if (c.problem2_path.empty()) throw std::invalid_argument("pmatrix requires --problem2");
  const DiracProblem q = load_valid(c.problem2_path);
  const auto [lo, hi] = window_or(c, 0.1, 10.1);
  const double tol = c.tol > 0.0 ? c.tol : 1e-7;
  if (c.grid < 1) throw std::invalid_argument("--grid must be positive");
  Report r{"pmatrix", {}, {"x", "lambda", "deviation", "discrepancy"}, {}};
  double max_dev = 0.0, max_disc = 0.0;
  long long dropped = 0;
  for (int k = 0; k < c.grid; ++k) {
    const double t = (k + 0.5) / c.grid;
    const double x = p.a() + (p.b() - p.a()) * t;
    const double lambda = lo + (hi - lo) * std::fmod(t * 7.0, 1.0);
    PMatrixEvaluation ev;
    try {
      ev = p_matrix_evaluate(p, q, x, lambda);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kPoleAtEigenvalue) throw;
      ++dropped;
      continue;
    }
    const double dev = (ev.direct - Matrix2c::Identity()).cwiseAbs().maxCoeff();
    max_dev = std::max(max_dev, dev);
    max_disc = std::max(max_disc, ev.discrepancy);
    r.rows.push_back({x, lambda, dev, ev.discrepancy});
  }
  r.summary.emplace_back("max_deviation", max_dev);
  r.summary.emplace_back("max_discrepancy", max_disc);
  r.summary.emplace_back("dropped", dropped);
  if (max_disc > tol)
    throw Error(ErrorCode::kInconsistent, "p_matrix",
                "direct and decomposed evaluations differ by " + number(max_disc, false));
  return r;
}

Report cmd_reconstruct(const RunConfig& c) {
  const DiracProblem p = load_valid(c.problem_path);
  ReconstructionSpec spec{p, {}, {}, {}, {}, {}};
  for (const auto& s : c.parameters) spec.parameters.push_back(parse_parameter(s));
  if (spec.parameters.empty()) throw std::invalid_argument("reconstruct requires at least one --param");
  if (!c.targets_path.empty()) spec.targets_main = read_targets(c.targets_path);
  if (!c.aux_targets_path.empty()) spec.targets_aux = read_targets(c.aux_targets_path);
  ReconstructionOptions opts;
  if (c.tol > 0.0) opts.tol = c.tol;
  opts.seed = c.seed;
  opts.random_starts = 2;
  for (const auto& s : c.starts) {
    std::vector<double> v;
    for (const auto& item : split(s, ',')) v.push_back(to_double(item, "start value"));
    opts.starts.push_back(std::move(v));
  }
  const ReconstructionResult res = reconstruct(spec, opts);
  Report r{"reconstruct", {}, {"section", "name", "index", "value"}, {}};
  r.summary.emplace_back("rms", res.rms);
  r.summary.emplace_back("starts", static_cast<long long>(res.starts.size()));
  for (std::size_t j = 0; j < res.parameters.size(); ++j)
    r.rows.push_back({std::string("parameter"), spec.parameters[j].name, static_cast<long long>(j),
                      res.parameters[j]});
  for (std::size_t k = 0; k < res.mismatch_main.size(); ++k)
    r.rows.push_back({std::string("mismatch_main"), std::string("lambda"), static_cast<long long>(k),
                      res.mismatch_main[k]});
  for (std::size_t k = 0; k < res.mismatch_aux.size(); ++k)
    r.rows.push_back({std::string("mismatch_aux"), std::string("tau"), static_cast<long long>(k),
                      res.mismatch_aux[k]});
  return r;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidProblem:
    case ErrorCode::kParse: return kValidation;
    case ErrorCode::kIo: return kIoFailure;
    default: return kNumerical;
  }
}

}  // namespace

std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out) {
  RunConfig c;
  CLI::App app{"Spectral computations for Dirac systems with transmission conditions"};
  app.add_option("command", c.command, "scan | spectrum | asympt | weyl | pmatrix | reconstruct | validate")
      ->required()
      ->check(CLI::IsMember({"scan", "spectrum", "asympt", "weyl", "pmatrix", "reconstruct", "validate"}));
  app.add_option("--problem", c.problem_path, "Problem file");
  app.add_option("--problem2", c.problem2_path, "Second problem file (weyl distance, pmatrix)");
  std::vector<double> window;
  app.add_option("--window", window, "Spectral window <min> <max>")->expected(2)->allow_extra_args(false);
  app.add_option("--grid", c.grid, "Grid size");
  app.add_option("--tol", c.tol, "Tolerance (0: command default)");
  app.add_option("--out", c.out_path, "Output file (default: standard output)");
  app.add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", c.seed, "Seed for random multistart points");
  app.add_flag("--auxiliary", c.auxiliary, "spectrum: use the problem with y1(a) = 0");
  app.add_option("--targets", c.targets_path, "reconstruct: spectrum output of L");
  app.add_option("--aux-targets", c.aux_targets_path, "reconstruct: spectrum output of L1");
  app.add_option("--param", c.parameters, "reconstruct: name=slot[,slot]:lower:upper (slots p0, r1, q0, theta1)");
  app.add_option("--start", c.starts, "reconstruct: comma-separated start vector");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw std::invalid_argument(e.what());
  }
  if (!window.empty()) c.window = std::pair{window[0], window[1]};
  return c;
}

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  Report report;
  int status = kSuccess;
  try {
    if (c.format != "csv" && c.format != "json") throw std::invalid_argument("--format must be csv or json");
    if (c.command == "validate") {
      bool ok = false;
      report = cmd_validate(c, err, ok);
      if (!ok) status = kValidation;
    } else if (c.command == "scan") {
      report = cmd_scan(c, err);
    } else if (c.command == "spectrum") {
      report = cmd_spectrum(c, err);
    } else if (c.command == "asympt") {
      report = cmd_asympt(c);
    } else if (c.command == "weyl") {
      report = cmd_weyl(c);
    } else if (c.command == "pmatrix") {
      report = cmd_pmatrix(c);
    } else if (c.command == "reconstruct") {
      report = cmd_reconstruct(c);
    } else {
      throw std::invalid_argument("unknown command '" + c.command + "'");
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumerical;
  }

  std::ostringstream text;
  if (c.format == "json") write_json(report, text);
  else write_csv(report, text);
  if (c.out_path.empty()) {
    out << text.str();
    return status;
  }
  std::ofstream file(c.out_path);
  if (!file || !(file << text.str())) {
    err << "error: cannot write " << c.out_path << "\n";
    return kIoFailure;
  }
  return status;
}

}  // namespace dirac::cli
