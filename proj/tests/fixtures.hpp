// Copyright 2026 The ctcsim Authors.
// Licensed under the Apache License, Version 2.0. You may obtain a copy of
// the License at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

// Frozen regression inputs shared by the unit and acceptance tests.

#include "ctcsim/qmath.hpp"

namespace ctc::testing {

// Two-qubit CR (x) CTC unitary found by a seeded Haar search (seed 424242,
// best of 200 draws) for a large nonlinearity witness with rho1 = |0><0|,
// rho2 = |+><+|, p = 1/2. Witness at freeze time: 0.263717.
inline qmath::ComplexMatrix nonlinear_unitary() {
  using C = qmath::Complex;
  qmath::ComplexMatrix u(4, 4);
  u << C{-0.44281607832326775, -0.012753220504298505},
       C{0.37625773674371088, -0.26901882186576848},
       C{-0.30432417105119741, 0.55658100403639565},
       C{0.1128967280487112, -0.41793418001326371},
       C{0.41726073326790147, -0.33309404142328042},
       C{0.6312133058349767, -0.28941448783996371},
       C{0.09132095797756927, 0.067732972347612386},
       C{-0.40450764684309265, 0.23705937556386808},
       C{-0.22864894197999303, -0.52551902225272662},
       C{-0.11749401741626725, 0.065740935032901626},
       C{0.17393908648907824, -0.34807509640450807},
       C{-0.39659581052543819, -0.58713149161185485},
       C{0.084459079008059587, -0.42791260642949963},
       C{-0.3912140920964981, 0.36427026404191198},
       C{-0.080639443448753831, 0.65327124042427298},
       C{-0.21952275909272831, 0.20630050641453535};
  return u;
}

inline constexpr double kNonlinearWitnessAtFreeze = 0.263717;

}  // namespace ctc::testing
