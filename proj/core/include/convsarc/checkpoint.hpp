#pragma once

#include <string>

#include "convsarc/encoder.hpp"

namespace convsarc {

// Checkpoint directory layout, format version 1:
//   model.json   - format version, encoder spec, architecture config
//   hparams.json - the Hyperparams the run used
//   history.json - per-epoch train loss / val loss / val macro F1
//   weights.bin  - every parameter tensor (see weights_io.hpp)
void save_checkpoint(const std::string& dir, TrainedModel& model);

TrainedModel load_checkpoint(const std::string& dir);

}  // namespace convsarc
