#include "wmcgrad/dimacs.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

namespace wmcgrad {
namespace {

struct WeightDecl {
  std::optional<double> pos, neg;
};

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

long long parse_int(std::string_view tok, int line_no) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError("line " + std::to_string(line_no) + ": expected integer, got '" +
                     std::string(tok) + "'");
  return v;
}

double parse_real(std::string_view tok, int line_no) {
  std::string s(tok);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v))
    throw ParseError("line " + std::to_string(line_no) + ": expected number, got '" + s + "'");
  return v;
}

void record_weight(std::vector<std::pair<long long, double>>& pending, std::string_view lit_tok,
                   std::string_view w_tok, int line_no) {
  const long long lit = parse_int(lit_tok, line_no);
  const double w = parse_real(w_tok, line_no);
  if (lit == 0) throw ParseError("line " + std::to_string(line_no) + ": weight for literal 0");
  if (!(w >= 0.0 && w <= 1.0))
    throw ParseError("line " + std::to_string(line_no) + ": weight outside [0,1]");
  pending.emplace_back(lit, w);
}

}  // namespace

DimacsInstance parse_dimacs(std::istream& in) {
  DimacsInstance out;
  bool have_header = false;
  long long num_vars = 0;
  std::vector<std::pair<long long, double>> pending_weights;
  Clause current;
  std::string line;
  int line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = split(line);
    if (toks.empty()) continue;
    if (toks[0] == "c") {
      if (toks.size() >= 5 && toks[1] == "p" && toks[2] == "weight") {
        if (toks.size() > 6 || (toks.size() == 6 && toks[5] != "0"))
          throw ParseError("line " + std::to_string(line_no) + ": malformed weight line");
        record_weight(pending_weights, toks[3], toks[4], line_no);
      }
      continue;
    }
    if (toks[0][0] == 'c') continue;
    if (toks[0] == "w") {
      if (toks.size() < 3 || toks.size() > 4 || (toks.size() == 4 && toks[3] != "0"))
        throw ParseError("line " + std::to_string(line_no) + ": malformed weight line");
      record_weight(pending_weights, toks[1], toks[2], line_no);
      continue;
    }
    if (toks[0] == "p") {
      if (have_header) throw ParseError("line " + std::to_string(line_no) + ": duplicate header");
      if (toks.size() != 4 || toks[1] != "cnf")
        throw ParseError("line " + std::to_string(line_no) + ": malformed header");
      num_vars = parse_int(toks[2], line_no);
      const long long num_clauses = parse_int(toks[3], line_no);
      if (num_vars < 0 || num_clauses < 0 || num_vars > (1 << 28))
        throw ParseError("line " + std::to_string(line_no) + ": malformed header");
      have_header = true;
      out.formula.num_vars = static_cast<int>(num_vars);
      out.formula.clauses.reserve(static_cast<size_t>(std::min<long long>(num_clauses, 1 << 24)));
      continue;
    }
    if (!have_header)
      throw ParseError("line " + std::to_string(line_no) + ": clause before 'p cnf' header");
    for (auto tok : toks) {
      const long long lit = parse_int(tok, line_no);
      if (lit == 0) {
        if (normalize_clause(current)) out.formula.clauses.push_back(std::move(current));
        current = {};
        continue;
      }
      if (std::llabs(lit) > num_vars)
        throw ParseError("line " + std::to_string(line_no) + ": literal " + std::to_string(lit) +
                         " out of range");
      current.emplace_back(static_cast<int>(lit));
    }
  }
  if (!have_header) throw ParseError("missing 'p cnf' header");
  if (!current.empty()) throw ParseError("unterminated clause at end of input");

  std::vector<WeightDecl> decls(static_cast<size_t>(num_vars));
  for (auto [lit, w] : pending_weights) {
    if (std::llabs(lit) > num_vars)
      throw ParseError("weight for literal " + std::to_string(lit) + " out of range");
    auto& slot = lit > 0 ? decls[lit - 1].pos : decls[-lit - 1].neg;
    if (slot) throw ParseError("duplicate weight declaration for literal " + std::to_string(lit));
    slot = w;
  }

  out.weights = WeightMap(static_cast<int>(num_vars));
  out.unweighted.assign(static_cast<size_t>(num_vars), false);
  for (int v = 1; v <= num_vars; ++v) {
    const auto& d = decls[v - 1];
    bool unweighted = false;
    double p = 0.5;
    if (!d.pos && !d.neg) {
      unweighted = true;
    } else if (d.pos && d.neg) {
      if (*d.pos == 1.0 && *d.neg == 1.0) {
        unweighted = true;
      } else if (std::abs(*d.pos + *d.neg - 1.0) <= 1e-9) {
        p = *d.pos;
      } else {
        throw ParseError("weights of variable " + std::to_string(v) + " do not sum to 1");
      }
    } else {
      p = d.pos ? *d.pos : 1.0 - *d.neg;
    }
    if (unweighted) {
      out.unweighted[v - 1] = true;
      ++out.normalization_exponent;
    } else {
      out.weights.set(v, p);
    }
  }
  return out;
}

DimacsInstance parse_dimacs(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_dimacs(in);
}

DimacsInstance read_dimacs_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open " + path);
  return parse_dimacs(in);
}

std::string serialize_dimacs(const DimacsInstance& instance) {
  const CnfFormula& phi = instance.formula;
  std::string out = "p cnf " + std::to_string(phi.num_vars) + " " +
                    std::to_string(phi.clauses.size()) + "\n";
  char buf[64];
  for (int v = 1; v <= phi.num_vars; ++v) {
    const bool unweighted =
        static_cast<size_t>(v - 1) < instance.unweighted.size() && instance.unweighted[v - 1];
    if (unweighted) continue;
    std::snprintf(buf, sizeof buf, "%.17g", instance.weights.prob(v));
    out += "c p weight " + std::to_string(v) + " " + buf + " 0\n";
  }
  for (const Clause& c : phi.clauses) {
    for (Literal l : c) {
      out += std::to_string(l.dimacs());
      out += ' ';
    }
    out += "0\n";
  }
  return out;
}

}  // namespace wmcgrad
