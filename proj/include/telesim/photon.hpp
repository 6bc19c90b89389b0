#pragma once

#include "telesim/elementary.hpp"

namespace telesim {

enum class EngineKind { StandardQM, ElementaryState };

enum class PathTag { AtSource, ToCoder, ToBeamSplitter, ToPbs, ToDetector };

// A photon moving through the optical network. Photons 0..3 are the role
// labels of the two emitted pairs. Under the state-vector engine the
// photon's polarization lives in the trial's shared StateVector under the
// label `photon_id`; under the hidden-variable engine it is `es`.
struct PhotonRecord {
  int photon_id = 0;
  PathTag path = PathTag::AtSource;
  double arrival_time = 0.0;
  elementary::EsPtr es;  // null under the state-vector engine
};

}  // namespace telesim
