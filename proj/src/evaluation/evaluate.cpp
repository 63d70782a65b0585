#include "ctiv/evaluation/evaluate.hpp"

#include "ctiv/errors.hpp"

namespace ctiv::evaluation {

Evaluation evaluate(const learners::TrainedModel& model, const features::Matrix& test,
                    std::span<const std::string> labels, Averaging averaging) {
  if (test.rows() == 0) throw ContractError("evaluation needs a nonempty test set");
  if (labels.size() != test.rows()) throw ContractError("label count does not match test rows");
  const auto prediction = model.predict(test);
  Evaluation out;
  out.report = metrics(confusion(labels, std::span<const std::string>(prediction.labels)), averaging);
  out.timing = TimingReport(model.timing.train_time(), prediction.seconds);
  return out;
}

}  // namespace ctiv::evaluation
