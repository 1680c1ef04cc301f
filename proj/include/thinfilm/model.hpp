#pragma once

// Solver-agnostic algebraic model and its LP-format text form.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "thinfilm/errors.hpp"

namespace thinfilm {

enum class VarKind { Continuous, Binary };
enum class Sense { LessEqual, Equal, GreaterEqual };

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = 0.0;
  VarKind kind = VarKind::Continuous;
};

struct LinearTerm {
  std::size_t var;
  double coef;
};

struct QuadraticTerm {
  std::size_t var1;
  std::size_t var2;
  double coef;
};

struct Constraint {
  std::string name;
  std::vector<LinearTerm> linear;
  std::vector<QuadraticTerm> quadratic;
  Sense sense = Sense::Equal;
  double rhs = 0.0;

  bool is_quadratic() const { return !quadratic.empty(); }
};

/// Maximize constant + sum(coef * var).
struct Objective {
  std::vector<LinearTerm> linear;
  double constant = 0.0;
};

class Model {
 public:
  std::size_t add_variable(std::string name, double lower, double upper,
                           VarKind kind = VarKind::Continuous) {
    if (index_.contains(name)) throw InvalidArgument("duplicate variable " + name);
    index_.emplace(name, variables_.size());
    variables_.push_back({std::move(name), lower, upper, kind});
    return variables_.size() - 1;
  }

  void add_constraint(Constraint c) {
    for (const auto& t : c.linear)
      if (t.var >= variables_.size()) throw InvalidArgument("constraint " + c.name + " references unknown variable");
    for (const auto& t : c.quadratic)
      if (t.var1 >= variables_.size() || t.var2 >= variables_.size())
        throw InvalidArgument("constraint " + c.name + " references unknown variable");
    constraints_.push_back(std::move(c));
  }

  std::optional<std::size_t> find(std::string_view name) const {
    const auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  Objective& objective() { return objective_; }
  const Objective& objective() const { return objective_; }

  /// Comment lines emitted at the top of the LP file.
  std::vector<std::string>& header() { return header_; }
  const std::vector<std::string>& header() const { return header_; }

  std::size_t binary_count() const {
    std::size_t n = 0;
    for (const auto& v : variables_) n += v.kind == VarKind::Binary;
    return n;
  }
  std::size_t linear_constraint_count() const {
    std::size_t n = 0;
    for (const auto& c : constraints_) n += !c.is_quadratic();
    return n;
  }
  std::size_t quadratic_constraint_count() const { return constraints_.size() - linear_constraint_count(); }

  /// Throws InvalidArgument when a continuous variable has an infinite bound.
  void validate() const {
    for (const auto& v : variables_) {
      if (v.kind == VarKind::Continuous && (!std::isfinite(v.lower) || !std::isfinite(v.upper)))
        throw InvalidArgument("variable " + v.name + " has an infinite bound");
      if (v.lower > v.upper) throw InconsistentBounds("variable " + v.name + " has lower > upper");
    }
  }

 private:
  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  Objective objective_;
  std::vector<std::string> header_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Equal up to a relative tolerance on every number.
inline bool structurally_equal(const Model& a, const Model& b, double rel_tol = 0.0) {
  auto close = [&](double x, double y) {
    return x == y || std::abs(x - y) <= rel_tol * std::max(std::abs(x), std::abs(y));
  };
  if (a.variables().size() != b.variables().size() || a.constraints().size() != b.constraints().size())
    return false;
  for (std::size_t i = 0; i < a.variables().size(); ++i) {
    const auto& x = a.variables()[i];
    const auto& y = b.variables()[i];
    if (x.name != y.name || x.kind != y.kind || !close(x.lower, y.lower) || !close(x.upper, y.upper)) return false;
  }
  auto same_linear = [&](const std::vector<LinearTerm>& x, const std::vector<LinearTerm>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i].var != y[i].var || !close(x[i].coef, y[i].coef)) return false;
    return true;
  };
  for (std::size_t i = 0; i < a.constraints().size(); ++i) {
    const auto& x = a.constraints()[i];
    const auto& y = b.constraints()[i];
    if (x.name != y.name || x.sense != y.sense || !close(x.rhs, y.rhs) || !same_linear(x.linear, y.linear) ||
        x.quadratic.size() != y.quadratic.size())
      return false;
    for (std::size_t q = 0; q < x.quadratic.size(); ++q)
      if (x.quadratic[q].var1 != y.quadratic[q].var1 || x.quadratic[q].var2 != y.quadratic[q].var2 ||
          !close(x.quadratic[q].coef, y.quadratic[q].coef))
        return false;
  }
  return same_linear(a.objective().linear, b.objective().linear) &&
         close(a.objective().constant, b.objective().constant);
}

/// Value of the objective at `values` (one per variable).
inline double objective_value(const Model& m, const std::vector<double>& values) {
  double acc = m.objective().constant;
  for (const auto& t : m.objective().linear) acc += t.coef * values[t.var];
  return acc;
}

inline double activity(const Constraint& c, const std::vector<double>& values) {
  double acc = 0.0;
  for (const auto& t : c.linear) acc += t.coef * values[t.var];
  for (const auto& t : c.quadratic) acc += t.coef * values[t.var1] * values[t.var2];
  return acc;
}

struct Violation {
  std::string what;  // constraint or variable name
  double amount;
};

/// Every bound, integrality, and constraint violated by more than `tol`
/// (scaled by 1 + |rhs| for constraints).
inline std::vector<Violation> violations(const Model& m, const std::vector<double>& values, double tol) {
  std::vector<Violation> out;
  for (std::size_t i = 0; i < m.variables().size(); ++i) {
    const auto& v = m.variables()[i];
    const double x = values[i];
    if (x < v.lower - tol) out.push_back({v.name, v.lower - x});
    if (x > v.upper + tol) out.push_back({v.name, x - v.upper});
    if (v.kind == VarKind::Binary && std::abs(x - std::round(x)) > tol)
      out.push_back({v.name, std::abs(x - std::round(x))});
  }
  for (const auto& c : m.constraints()) {
    const double lhs = activity(c, values);
    const double slack_tol = tol * (1.0 + std::abs(c.rhs));
    double excess = 0.0;
    switch (c.sense) {
      case Sense::LessEqual: excess = lhs - c.rhs; break;
      case Sense::GreaterEqual: excess = c.rhs - lhs; break;
      case Sense::Equal: excess = std::abs(lhs - c.rhs); break;
    }
    if (excess > slack_tol) out.push_back({c.name, excess});
  }
  return out;
}

namespace lp {

inline std::string number(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

class LineWriter {
 public:
  explicit LineWriter(std::string& out) : out_(out) {}
  void begin(std::string_view first) {
    out_ += ' ';
    out_ += first;
    width_ = first.size() + 1;
  }
  void token(std::string_view t) {
    if (width_ + t.size() + 1 > kWrap) {
      out_ += "\n  ";
      width_ = 2;
    } else {
      out_ += ' ';
      ++width_;
    }
    out_ += t;
    width_ += t.size();
  }
  void end() { out_ += '\n'; }

 private:
  static constexpr std::size_t kWrap = 200;
  std::string& out_;
  std::size_t width_ = 0;
};

inline void write_linear(LineWriter& w, const Model& m, const std::vector<LinearTerm>& terms, bool& first) {
  for (const auto& t : terms) {
    const double mag = std::abs(t.coef);
    std::string s = t.coef < 0.0 ? "- " : (first ? "" : "+ ");
    if (mag != 1.0) s += number(mag) + " ";
    s += m.variables()[t.var].name;
    w.token(s);
    first = false;
  }
}

inline const char* sense_token(Sense s) {
  switch (s) {
    case Sense::LessEqual: return "<=";
    case Sense::GreaterEqual: return ">=";
    case Sense::Equal: return "=";
  }
  return "=";
}

}  // namespace lp

/// LP-format text. Variable order is fixed by the Bounds section, which
/// lists every variable.
inline std::string write_lp(const Model& m) {
  std::string out;
  for (const auto& h : m.header()) out += "\\ " + h + "\n";
  if (!m.variables().empty()) {
    out += "Maximize\n";
    lp::LineWriter w(out);
    w.begin("obj:");
    bool first = true;
    lp::write_linear(w, m, m.objective().linear, first);
    if (m.objective().constant != 0.0 || first) {
      const double c = m.objective().constant;
      w.token((c < 0.0 ? "- " : (first ? "" : "+ ")) + lp::number(std::abs(c)));
    }
    w.end();
  }
  if (!m.constraints().empty()) {
    out += "Subject To\n";
    lp::LineWriter w(out);
    for (const auto& c : m.constraints()) {
      w.begin(c.name + ":");
      bool first = true;
      lp::write_linear(w, m, c.linear, first);
      if (!c.quadratic.empty()) {
        w.token(first ? "[" : "+ [");
        bool qfirst = true;
        for (const auto& q : c.quadratic) {
          const double mag = std::abs(q.coef);
          std::string s = q.coef < 0.0 ? "- " : (qfirst ? "" : "+ ");
          if (mag != 1.0) s += lp::number(mag) + " ";
          s += m.variables()[q.var1].name;
          s += q.var1 == q.var2 ? " ^ 2" : " * " + m.variables()[q.var2].name;
          w.token(s);
          qfirst = false;
        }
        w.token("]");
        first = false;
      }
      if (first) w.token("0");
      w.token(lp::sense_token(c.sense));
      w.token(lp::number(c.rhs));
      w.end();
    }
  }
  if (!m.variables().empty()) {
    out += "Bounds\n";
    for (const auto& v : m.variables()) {
      if (v.lower == v.upper)
        out += " " + v.name + " = " + lp::number(v.lower) + "\n";
      else
        out += " " + lp::number(v.lower) + " <= " + v.name + " <= " + lp::number(v.upper) + "\n";
    }
    if (m.binary_count() > 0) {
      out += "Binaries\n";
      for (const auto& v : m.variables())
        if (v.kind == VarKind::Binary) out += " " + v.name + "\n";
    }
  }
  out += "End\n";
  return out;
}

/// Write `contents` to `path` through a temporary file and a rename.
inline void write_file_atomically(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << contents;
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

inline void export_lp(const Model& m, const std::filesystem::path& path) {
  write_file_atomically(path, write_lp(m));
}

namespace lp {

class Tokens {
 public:
  explicit Tokens(std::string_view text) {
    std::size_t i = 0;
    while (i < text.size()) {
      const char c = text[i];
      if (c == '\\') {  // comment to end of line
        while (i < text.size() && text[i] != '\n') ++i;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
      } else if (c == '[' || c == ']' || c == '+' || c == '-' || c == '*' || c == '^') {
        // '-' and '+' inside a number exponent are handled below
        toks_.emplace_back(1, c);
        ++i;
      } else if (c == '<' || c == '>' || c == '=') {
        std::size_t j = i + 1;
        if (j < text.size() && (text[j] == '=' || text[j] == '<' || text[j] == '>')) ++j;
        toks_.emplace_back(text.substr(i, j - i));
        i = j;
      } else {
        std::size_t j = i;
        while (j < text.size()) {
          const char d = text[j];
          if (std::isspace(static_cast<unsigned char>(d)) || d == '[' || d == ']' || d == '*' || d == '^' ||
              d == '<' || d == '>' || d == '=' || d == '\\')
            break;
          if ((d == '+' || d == '-') && !(j > i && (text[j - 1] == 'e' || text[j - 1] == 'E') && is_numeric_prefix(text.substr(i, j - i - 1))))
            break;
          ++j;
        }
        toks_.emplace_back(text.substr(i, j - i));
        i = j;
      }
    }
  }

  bool done() const { return pos_ >= toks_.size(); }
  const std::string& peek(std::size_t ahead = 0) const {
    static const std::string empty;
    return pos_ + ahead < toks_.size() ? toks_[pos_ + ahead] : empty;
  }
  std::string next() {
    if (done()) throw ParseError("LP: unexpected end of input");
    return toks_[pos_++];
  }
  void expect(std::string_view t) {
    const auto got = next();
    if (got != t) throw ParseError("LP: expected '" + std::string(t) + "', got '" + got + "'");
  }

 private:
  static bool is_numeric_prefix(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
      if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '.')) return false;
    return true;
  }
  std::vector<std::string> toks_;
  std::size_t pos_ = 0;
};

inline std::optional<double> as_number(const std::string& t) {
  if (t.empty()) return std::nullopt;
  double v = 0.0;
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (r.ec != std::errc() || r.ptr != t.data() + t.size()) return std::nullopt;
  return v;
}

inline bool is_sense(const std::string& t) {
  return t == "<=" || t == ">=" || t == "=" || t == "<" || t == ">" || t == "=<" || t == "=>";
}

inline Sense to_sense(const std::string& t) {
  if (t == "<=" || t == "<" || t == "=<") return Sense::LessEqual;
  if (t == ">=" || t == ">" || t == "=>") return Sense::GreaterEqual;
  return Sense::Equal;
}

inline bool is_section(const Tokens& tk) {
  const auto& t = tk.peek();
  return t == "Maximize" || t == "Minimize" || t == "Bounds" || t == "Binaries" || t == "End" ||
         t == "Generals" || (t == "Subject" && tk.peek(1) == "To");
}

struct RawConstraint {
  std::string name;
  std::vector<std::pair<std::string, double>> linear;
  std::vector<std::tuple<std::string, std::string, double>> quadratic;
  Sense sense = Sense::Equal;
  double rhs = 0.0;
};

// Reads "[sign] [coef] name" style terms until a sense token or a section.
inline void read_terms(Tokens& tk, RawConstraint& rc, double& constant) {
  while (!tk.done() && !is_sense(tk.peek()) && !is_section(tk)) {
    double sign = 1.0;
    while (tk.peek() == "+" || tk.peek() == "-") sign *= tk.next() == "-" ? -1.0 : 1.0;
    if (tk.peek() == "[") {
      tk.next();
      while (tk.peek() != "]") {
        double qs = 1.0;
        while (tk.peek() == "+" || tk.peek() == "-") qs *= tk.next() == "-" ? -1.0 : 1.0;
        double coef = 1.0;
        if (const auto v = as_number(tk.peek())) {
          coef = *v;
          tk.next();
        }
        const auto a = tk.next();
        if (tk.peek() == "^") {
          tk.next();
          tk.expect("2");
          rc.quadratic.emplace_back(a, a, sign * qs * coef);
        } else {
          tk.expect("*");
          rc.quadratic.emplace_back(a, tk.next(), sign * qs * coef);
        }
      }
      tk.next();
      continue;
    }
    double coef = 1.0;
    if (const auto v = as_number(tk.peek())) {
      tk.next();
      const auto& after = tk.peek();
      if (tk.done() || is_sense(after) || is_section(tk) || after == "+" || after == "-" ||
          (!after.empty() && after.back() == ':')) {
        constant += sign * *v;
        continue;
      }
      coef = *v;
    }
    rc.linear.emplace_back(tk.next(), sign * coef);
  }
}

}  // namespace lp

/// Parse LP text produced by write_lp (and the common subset of the format).
inline Model parse_lp(std::string_view text) {
  lp::Tokens tk(text);
  std::vector<std::string> header;
  {
    std::istringstream lines{std::string(text)};
    std::string line;
    while (std::getline(lines, line) && line.rfind("\\ ", 0) == 0) header.push_back(line.substr(2));
  }

  lp::RawConstraint obj;
  double obj_const = 0.0;
  std::vector<lp::RawConstraint> rows;
  std::vector<std::tuple<std::string, double, double>> bounds;
  std::vector<std::string> binaries;

  while (!tk.done()) {
    const auto sec = tk.next();
    if (sec == "Maximize") {
      if (!tk.peek().empty() && tk.peek().back() == ':') tk.next();
      lp::read_terms(tk, obj, obj_const);
    } else if (sec == "Minimize") {
      throw ParseError("LP: only Maximize models are supported");
    } else if (sec == "Subject") {
      tk.expect("To");
      while (!tk.done() && !lp::is_section(tk)) {
        lp::RawConstraint rc;
        auto name = tk.next();
        if (name.empty() || name.back() != ':') throw ParseError("LP: constraint without a name near " + name);
        rc.name = name.substr(0, name.size() - 1);
        double constant = 0.0;
        lp::read_terms(tk, rc, constant);
        rc.sense = lp::to_sense(tk.next());
        auto rhs = tk.next();
        double sgn = 1.0;
        if (rhs == "-" || rhs == "+") {
          sgn = rhs == "-" ? -1.0 : 1.0;
          rhs = tk.next();
        }
        const auto v = lp::as_number(rhs);
        if (!v) throw ParseError("LP: bad right-hand side in " + rc.name);
        rc.rhs = sgn * *v - constant;
        rows.push_back(std::move(rc));
      }
    } else if (sec == "Bounds") {
      while (!tk.done() && !lp::is_section(tk)) {
        auto signed_number = [&]() {
          double s = 1.0;
          while (tk.peek() == "-" || tk.peek() == "+") s *= tk.next() == "-" ? -1.0 : 1.0;
          const auto t = tk.next();
          const auto v = lp::as_number(t);
          if (!v) throw ParseError("LP: bad bound value '" + t + "'");
          return s * *v;
        };
        if (lp::as_number(tk.peek()) || tk.peek() == "-" || tk.peek() == "+") {
          const double lo = signed_number();
          tk.expect("<=");
          const auto name = tk.next();
          tk.expect("<=");
          const double hi = signed_number();
          bounds.emplace_back(name, lo, hi);
        } else {
          const auto name = tk.next();
          tk.expect("=");
          const double v = signed_number();
          bounds.emplace_back(name, v, v);
        }
      }
    } else if (sec == "Binaries") {
      while (!tk.done() && !lp::is_section(tk)) binaries.push_back(tk.next());
    } else if (sec == "End") {
      break;
    } else {
      throw ParseError("LP: unexpected token '" + sec + "'");
    }
  }

  Model m;
  m.header() = header;
  for (const auto& [name, lo, hi] : bounds) m.add_variable(name, lo, hi);
  auto var = [&](const std::string& name) {
    if (const auto i = m.find(name)) return *i;
    return m.add_variable(name, 0.0, std::numeric_limits<double>::infinity());
  };
  for (const auto& [name, c] : obj.linear) m.objective().linear.push_back({var(name), c});
  m.objective().constant = obj_const;
  for (auto& rc : rows) {
    Constraint c;
    c.name = rc.name;
    c.sense = rc.sense;
    c.rhs = rc.rhs;
    for (const auto& [name, coef] : rc.linear) c.linear.push_back({var(name), coef});
    for (const auto& [a, b, coef] : rc.quadratic) c.quadratic.push_back({var(a), var(b), coef});
    m.add_constraint(std::move(c));
  }
  if (!binaries.empty()) {
    // rebuild with binary kinds; variable order is unchanged
    Model typed;
    typed.header() = m.header();
    for (const auto& v : m.variables()) {
      const bool bin = std::find(binaries.begin(), binaries.end(), v.name) != binaries.end();
      typed.add_variable(v.name, v.lower, v.upper, bin ? VarKind::Binary : VarKind::Continuous);
    }
    typed.objective() = m.objective();
    for (const auto& c : m.constraints()) typed.add_constraint(c);
    return typed;
  }
  return m;
}

inline Model import_lp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_lp(ss.str());
}

}  // namespace thinfilm
