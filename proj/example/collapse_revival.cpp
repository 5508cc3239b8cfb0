// Collapse and revival of the first atom's inversion for two coherent fields,
// with and without evanescent coupling between the waveguides.

#include <cstdio>
#include <vector>

#include "aqc/observables.hpp"

int main() {
  const aqc::FieldPreparation field{aqc::coherent_field(5.0), aqc::coherent_field(5.0)};
  std::vector<double> times(2001);
  for (std::size_t i = 0; i < times.size(); ++i) times[i] = 50.0 * static_cast<double>(i) / 2000.0;

  for (double lambda3 : {0.0, 0.6}) {
    const aqc::CouplerParams params(1.0, 1.0, lambda3);
    const auto series =
        aqc::sweep_observables(field, aqc::AtomicPreparation::excited_excited, params, times);
    const auto revival = aqc::revival_time_estimate(series, aqc::InversionKind::sz1);
    std::printf("lambda3=%.1f  sz1(T=10)=%+.6f  n1(T=50)=%.6f  ", lambda3, series[400].sz1,
                series.back().n1);
    if (revival) {
      std::printf("first revival at T=%.3f\n", *revival);
    } else {
      std::printf("no revival detected on [0, 50]\n");
    }
  }
}
