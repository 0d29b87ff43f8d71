#include "ssm/cloud.hpp"

#include <limits>
#include <ostream>
#include <string>

#include "ssm/error.hpp"

namespace ssm {

std::vector<int> PointCloud::code(std::size_t i) const {
  std::vector<int> out(static_cast<std::size_t>(level));
  for (std::size_t pos = out.size(); pos-- > 0;) {
    out[pos] = static_cast<int>(i % alphabet) + 1;
    i /= alphabet;
  }
  return out;
}

PointCloud fixed_points(const IFSystem& system) {
  const std::size_t m = system.size();
  const double s = similarity_dimension(system);
  const auto w = letter_weights(system, s);
  PointCloud cloud;
  cloud.level = 1;
  cloud.dim = system.ambient_dim;
  cloud.alphabet = m;
  for (std::size_t i = 0; i < m; ++i) {
    const auto p = fixed_point(system.maps[i]);
    cloud.coords.insert(cloud.coords.end(), p.begin(), p.end());
    cloud.weights.push_back(w[i]);
    cloud.masses.push_back(Mass::from_double(w[i]));
    cloud.order_keys.push_back(i);
    cloud.first_letters.push_back(static_cast<std::uint16_t>(i));
  }
  return cloud;
}

PointCloud extend_cloud(const IFSystem& system, const PointCloud& cloud, std::size_t budget) {
  const std::size_t m = system.size();
  const std::size_t n = cloud.size();
  if (n > budget / m || cloud.level >= 40) {
    throw Error(ErrorCode::CapacityExceeded,
                "level " + std::to_string(cloud.level + 1) + " needs " + std::to_string(m) + "^" +
                    std::to_string(cloud.level + 1) + " points, over the budget of " +
                    std::to_string(budget));
  }
  const double s = similarity_dimension(system);
  const auto w = letter_weights(system, s);
  const std::size_t dim = cloud.dim;
  PointCloud out;
  out.level = cloud.level + 1;
  out.dim = dim;
  out.alphabet = m;
  out.coords.resize(n * m * dim);
  out.weights.resize(n * m);
  out.masses.resize(n * m);
  out.order_keys.resize(n * m);
  out.first_letters.resize(n * m);
  for (std::size_t i = 0; i < m; ++i) {
    const Similitude& f = system.maps[i];
    const bool plain = f.is_scaled_identity();
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t idx = i * n + j;
      const double* src = cloud.point(j);
      double* dst = out.coords.data() + idx * dim;
      if (plain) {
        for (std::size_t d = 0; d < dim; ++d) dst[d] = f.ratio * src[d] + f.translation[d];
      } else {
        f.apply(src, dst);
      }
      out.weights[idx] = w[i] * cloud.weights[j];
      out.masses[idx] = Mass::from_double(out.weights[idx]);
      out.order_keys[idx] = i + m * cloud.order_keys[j];
      out.first_letters[idx] = static_cast<std::uint16_t>(i);
    }
  }
  return out;
}

PointCloud build_cloud(const IFSystem& system, int k, std::size_t budget) {
  if (k < 1) throw Error(ErrorCode::IndexOutOfRange, "level must be at least 1");
  PointCloud cloud = fixed_points(system);
  while (cloud.level < k) cloud = extend_cloud(system, cloud, budget);
  return cloud;
}

double mass_of_code_prefix(const PointCloud& cloud, const std::vector<int>& prefix) {
  if (prefix.size() > static_cast<std::size_t>(cloud.level)) {
    throw Error(ErrorCode::PrefixTooLong, "prefix longer than the cloud level");
  }
  std::size_t lo = 0;
  std::size_t span = cloud.size();
  for (int letter : prefix) {
    if (letter < 1 || static_cast<std::size_t>(letter) > cloud.alphabet) {
      throw Error(ErrorCode::IndexOutOfRange, "prefix letter out of range");
    }
    span /= cloud.alphabet;
    lo += static_cast<std::size_t>(letter - 1) * span;
  }
  Mass acc;
  for (std::size_t i = lo; i < lo + span; ++i) acc += cloud.masses[i];
  return acc.to_double();
}

std::string format_code(const std::vector<int>& code, std::size_t alphabet) {
  std::string out;
  for (std::size_t i = 0; i < code.size(); ++i) {
    if (alphabet > 9 && i > 0) out += '.';
    out += std::to_string(code[i]);
  }
  return out;
}

void write_cloud_csv(std::ostream& out, const PointCloud& cloud) {
  out << "code";
  for (std::size_t d = 0; d < cloud.dim; ++d) out << ",x" << d + 1;
  out << ",weight\n";
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    out << format_code(cloud.code(i), cloud.alphabet);
    for (std::size_t d = 0; d < cloud.dim; ++d) out << ',' << cloud.point(i)[d];
    out << ',' << cloud.weights[i] << '\n';
  }
  out.precision(old);
}

}  // namespace ssm
