#include "pcnrm/generators.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pcnrm {

namespace {

int UniformInt(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

double Uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace

InstanceSpec RandomInstance(std::mt19937_64& rng, const RandomInstanceShape& shape) {
  InstanceSpec spec;
  spec.horizon = shape.horizon;
  const int m = UniformInt(rng, 1, shape.max_resources);
  const int n = UniformInt(rng, 2, std::max(2, shape.max_products));
  for (int i = 0; i < m; ++i) {
    spec.resources.push_back({"r" + std::to_string(i),
                              UniformInt(rng, 0, shape.max_capacity)});
  }
  for (int j = 0; j < n; ++j) {
    ProductSpec p;
    p.id = "p" + std::to_string(j);
    p.fare = std::round(Uniform(rng, 5.0, 60.0) * 4) / 4;
    const int first = UniformInt(rng, 0, m - 1);
    p.resources.push_back("r" + std::to_string(first));
    if (m > 1 && UniformInt(rng, 0, 2) == 0) {
      const int second = (first + UniformInt(rng, 1, m - 1)) % m;
      p.resources.push_back("r" + std::to_string(second));
    }
    spec.products.push_back(std::move(p));
  }
  const int segments = UniformInt(rng, 1, shape.max_segments);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int l = 0; l < segments; ++l) {
    std::shuffle(order.begin(), order.end(), rng);
    const int len = UniformInt(rng, 1, n);
    PreferenceList list;
    list.id = "l" + std::to_string(l);
    list.rate = std::round(Uniform(rng, 0.5, 4.0) * 100) / 100;
    for (int k = 0; k < len; ++k) {
      list.choices.push_back("p" + std::to_string(order[k]));
      if (k > 0) {
        list.transitions.push_back(UniformInt(rng, 0, 4) == 0
                                       ? 1.0
                                       : std::round(Uniform(rng, 0.3, 1.0) * 100) / 100);
      }
    }
    spec.segments.push_back(std::move(list));
  }
  return spec;
}

InstanceSpec BusLineInstance(std::mt19937_64& rng, const BusLineShape& shape) {
  InstanceSpec spec;
  spec.horizon = shape.horizon;
  for (int i = 0; i < shape.legs; ++i) {
    spec.resources.push_back({"leg" + std::to_string(i + 1), shape.capacity});
  }
  const int markets = std::max(1, shape.segments / 3);
  const int classes = std::max(1, shape.fare_classes);
  const double multiplier[] = {1.0, 1.35, 1.8, 2.4, 3.1, 4.0};
  for (int mk = 0; mk < markets; ++mk) {
    const int origin = UniformInt(rng, 0, shape.legs - 1);
    const int dest = UniformInt(rng, origin + 1, shape.legs);
    const double base = 20.0 * std::sqrt(static_cast<double>(dest - origin)) *
                        Uniform(rng, 0.9, 1.1);
    for (int c = 0; c < classes; ++c) {
      ProductSpec p;
      p.id = "m" + std::to_string(mk) + "c" + std::to_string(c);
      p.fare = std::round(base * multiplier[std::min(c, 5)]);
      for (int i = origin; i < dest; ++i) p.resources.push_back("leg" + std::to_string(i + 1));
      spec.products.push_back(std::move(p));
    }
  }
  const int len = std::min(shape.list_length, classes);
  std::vector<double> rates;
  for (int l = 0; l < shape.segments; ++l) {
    const int mk = l % markets;
    std::vector<int> cls(classes);
    std::iota(cls.begin(), cls.end(), 0);
    const int style = (l / markets) % 3;
    if (style == 1) std::reverse(cls.begin(), cls.end());
    if (style == 2) std::shuffle(cls.begin(), cls.end(), rng);
    PreferenceList list;
    list.id = "s" + std::to_string(l);
    for (int k = 0; k < len; ++k) {
      list.choices.push_back("m" + std::to_string(mk) + "c" + std::to_string(cls[k]));
      if (k > 0) list.transitions.push_back(std::round(Uniform(rng, 0.4, 0.95) * 100) / 100);
    }
    rates.push_back(Uniform(rng, 0.5, 1.5));
    spec.segments.push_back(std::move(list));
  }
  const double total = std::accumulate(rates.begin(), rates.end(), 0.0);
  const double target = shape.load_factor * shape.legs * shape.capacity / shape.horizon;
  for (int l = 0; l < shape.segments; ++l) {
    spec.segments[l].rate = rates[l] * target / total;
  }
  return spec;
}

}  // namespace pcnrm
