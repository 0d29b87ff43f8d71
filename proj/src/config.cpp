#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "ssm/error.hpp"
#include "ssm/ifs.hpp"

namespace ssm {

namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + msg);
}

double read_number(std::istringstream& in, int line, const std::string& field) {
  std::string tok;
  if (!(in >> tok)) fail(line, "missing value for '" + field + "'");
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    fail(line, "bad number '" + tok + "' for '" + field + "'");
  }
}

}  // namespace

IFSystem parse_config(std::istream& in) {
  std::size_t dim = 0;
  std::vector<Similitude> maps;
  std::optional<KnownConstants> known;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::string head;
    if (!(ls >> head)) continue;
    if (head == "dim") {
      const double d = read_number(ls, line, "dim");
      if (d < 1 || d != std::floor(d)) fail(line, "dim must be a positive integer");
      dim = static_cast<std::size_t>(d);
    } else if (head == "map") {
      if (dim == 0) fail(line, "'dim' must precede the first map");
      Similitude f;
      bool have_ratio = false;
      bool have_translate = false;
      std::string key;
      while (ls >> key) {
        if (key == "ratio") {
          f.ratio = read_number(ls, line, key);
          have_ratio = true;
        } else if (key == "rotate") {
          if (dim != 2) fail(line, "'rotate' is only valid in dimension 2");
          const double a = read_number(ls, line, key) * std::numbers::pi / 180.0;
          f.orthogonal = {std::cos(a), -std::sin(a), std::sin(a), std::cos(a)};
        } else if (key == "matrix") {
          f.orthogonal.clear();
          for (std::size_t i = 0; i < dim * dim; ++i) f.orthogonal.push_back(read_number(ls, line, key));
        } else if (key == "translate") {
          f.translation.clear();
          for (std::size_t i = 0; i < dim; ++i) f.translation.push_back(read_number(ls, line, key));
          have_translate = true;
        } else {
          fail(line, "unknown map field '" + key + "'");
        }
      }
      if (!have_ratio) fail(line, "map needs 'ratio'");
      if (!have_translate) fail(line, "map needs 'translate'");
      maps.push_back(std::move(f));
    } else if (head == "known") {
      KnownConstants kc;
      bool have_c = false;
      bool have_R = false;
      std::string key;
      while (ls >> key) {
        if (key == "c") {
          kc.c_exact = read_number(ls, line, key);
          have_c = true;
        } else if (key == "R") {
          kc.R_exact = read_number(ls, line, key);
          have_R = true;
        } else {
          fail(line, "unknown field '" + key + "' in 'known'");
        }
      }
      if (!have_c || !have_R) fail(line, "'known' needs both c and R");
      if (!(kc.c_exact > 0.0 && kc.c_exact <= kc.R_exact)) fail(line, "need 0 < c <= R");
      known = kc;
    } else {
      fail(line, "unknown directive '" + head + "'");
    }
  }
  if (maps.empty()) throw Error(ErrorCode::ParseError, "no maps given");
  return build_system(std::move(maps), known);
}

IFSystem load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  return parse_config(in);
}

}  // namespace ssm
