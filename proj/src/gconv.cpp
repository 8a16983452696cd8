#include "grouptc/gconv.hpp"

#include <algorithm>
#include <sstream>

#include "grouptc/io.hpp"

namespace gtc {

FilterBank::FilterBank(int k, int domain, std::vector<double> v)
    : channels(k), domain_size(domain), values(std::move(v)) {
  if (k < 1 || domain < 1 || values.size() != static_cast<std::size_t>(k) * static_cast<std::size_t>(domain))
    throw Error(ErrorKind::LengthMismatch, "filter bank shape does not match its values");
}

FeatureMap g_convolve(const FilterBank& bank, std::span<const double> f, const PermutationAction& action) {
  const int n = action.domain_size();
  if (bank.domain_size != n || static_cast<int>(f.size()) != n)
    throw Error(ErrorKind::LengthMismatch,
                "filters/signal do not match the action domain of size " + std::to_string(n));
  const FiniteGroup& group = action.group();
  FeatureMap out{action.group_ptr(), bank.channels,
                 std::vector<double>(static_cast<std::size_t>(bank.channels) * group.order(), 0.0)};
  for (int g = 0; g < group.order(); ++g) {
    const auto& p = action.perm(group.inv(g));
    for (int k = 0; k < bank.channels; ++k) {
      const auto phi = bank.filter(k);
      double acc = 0.0;
      for (int u = 0; u < n; ++u) acc += phi[static_cast<std::size_t>(p[u])] * f[static_cast<std::size_t>(u)];
      out.channel(k)[static_cast<std::size_t>(g)] = acc;
    }
  }
  return out;
}

std::vector<double> max_g_pool(const FeatureMap& theta) {
  std::vector<double> mu;
  mu.reserve(static_cast<std::size_t>(theta.channels));
  for (int k = 0; k < theta.channels; ++k) {
    const auto c = theta.channel(k);
    mu.push_back(*std::max_element(c.begin(), c.end()));
  }
  return mu;
}

FeatureMap translate(const FeatureMap& theta, int h) {
  FeatureMap out{theta.group, theta.channels, std::vector<double>(theta.values.size())};
  for (int k = 0; k < theta.channels; ++k) {
    const auto moved = translate<double>(*theta.group, h, theta.channel(k));
    std::copy(moved.begin(), moved.end(), out.channel(k).begin());
  }
  return out;
}

std::string feature_map_to_csv(const FeatureMap& theta) {
  std::ostringstream os;
  os << "# v1\nchannel,element,value\n";
  for (int k = 0; k < theta.channels; ++k)
    for (int g = 0; g < theta.order(); ++g) os << k << ',' << g << ',' << format_number(theta.channel(k)[g]) << '\n';
  return os.str();
}

}  // namespace gtc
