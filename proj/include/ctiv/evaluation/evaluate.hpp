#pragma once

#include <span>
#include <string>
#include <utility>

#include "ctiv/evaluation/metrics.hpp"
#include "ctiv/features/matrix.hpp"
#include "ctiv/learners/model.hpp"

namespace ctiv::evaluation {

struct Evaluation {
  EvalReport report;
  TimingReport timing;  // the model's train time plus the measured predict time
};

// Predicts `test`, times it and scores against `labels`. Throws
// ContractError on an empty test set.
Evaluation evaluate(const learners::TrainedModel& model, const features::Matrix& test,
                    std::span<const std::string> labels, Averaging averaging = Averaging::macro);

}  // namespace ctiv::evaluation
