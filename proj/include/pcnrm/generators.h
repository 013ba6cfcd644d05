#ifndef PCNRM_GENERATORS_H_
#define PCNRM_GENERATORS_H_

#include <random>

#include "pcnrm/model.h"

namespace pcnrm {

struct RandomInstanceShape {
  int max_products = 5;
  int max_segments = 3;
  int max_resources = 3;
  int max_capacity = 4;
  double horizon = 1.0;
};

// Small random network: products use one or two random resources, segments
// walk a random ordered subset with transitions in (0.3, 1].
InstanceSpec RandomInstance(std::mt19937_64& rng, const RandomInstanceShape& shape = {});

struct BusLineShape {
  int legs = 6;
  int capacity = 30;
  int fare_classes = 4;       // products per origin-destination pair set
  int segments = 18;
  int list_length = 4;
  double load_factor = 1.2;
  double horizon = 1.0;
};

// A line of `legs` consecutive legs. Products are (origin, destination, class)
// itineraries drawn so that every segment is interested in one
// origin-destination market and ranks its fare classes cheapest first with
// random transitions. Rates are scaled to the requested load factor.
InstanceSpec BusLineInstance(std::mt19937_64& rng, const BusLineShape& shape = {});

}  // namespace pcnrm

#endif  // PCNRM_GENERATORS_H_
