#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ssm {

/// x -> ratio * orthogonal * x + translation
struct Similitude {
  double ratio = 0.5;
  std::vector<double> orthogonal;  // row-major n x n
  std::vector<double> translation;

  std::size_t dim() const { return translation.size(); }
  bool is_scaled_identity() const;
  void apply(const double* x, double* out) const;
};

struct KnownConstants {
  double c_exact = 0.0;
  double R_exact = 0.0;
};

struct IFSystem {
  std::vector<Similitude> maps;
  std::size_t ambient_dim = 0;
  std::optional<KnownConstants> known_constants;

  std::size_t size() const { return maps.size(); }
};

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
};

struct DerivedConstants {
  double s = 0.0;
  double r_min = 0.0;
  double r_max = 0.0;
  double c_lo = 0.0;
  double c_hi = 0.0;
  double R_lo = 0.0;
  double R_hi = 0.0;
};

inline constexpr int kDefaultProbeDepth = 14;
inline constexpr double kDefaultBracketTol = 1e-6;

IFSystem build_system(std::vector<Similitude> maps,
                      std::optional<KnownConstants> known = std::nullopt);

double similarity_dimension(const IFSystem& system);

/// Solves f(x) = x.
std::vector<double> fixed_point(const Similitude& f);

/// Per-letter masses r_i^s; exactly 1/m when all ratios agree.
std::vector<double> letter_weights(const IFSystem& system, double s);

Bracket separation_gap(const IFSystem& system, int k_probe = kDefaultProbeDepth,
                       double tol = kDefaultBracketTol);
Bracket diameter(const IFSystem& system, int k_probe = kDefaultProbeDepth,
                 double tol = kDefaultBracketTol);

DerivedConstants derive_constants(const IFSystem& system,
                                  int k_probe = kDefaultProbeDepth,
                                  double tol = kDefaultBracketTol);

bool window_feasible(const DerivedConstants& dc, int k);
bool window_feasible(const IFSystem& system, int k);

enum class Family { Cantor, Sierpinski, Planar };

IFSystem cantor_system(double r);
IFSystem sierpinski_system(double r);
IFSystem planar_cantor_system(double r);
IFSystem family_system(Family family, double r);
const char* family_name(Family family);
std::optional<Family> parse_family(const std::string& name);

/// Copy of the system with exact constants dropped, so brackets are computed.
IFSystem without_known(IFSystem system);

/// Text config: one directive per line, '#' starts a comment.
///   dim <n>
///   map ratio <r> [rotate <deg> | matrix <n*n values>] translate <n values>
///   known c <value> R <value>
IFSystem parse_config(std::istream& in);
IFSystem load_config(const std::string& path);

}  // namespace ssm
