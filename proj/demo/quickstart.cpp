// Trains a height-2 tree on a synthetic oblique dataset, collapses it and
// reports held-out RMSE.
#include <iostream>

#include "dgt/dgt.hpp"

int main() {
  dgt::OracleTreeSpec spec;
  spec.height = 2;
  spec.input_dim = 2;
  dgt::GeneratedData gen = dgt::gen_oracle_tree(spec, 2500, 7);

  std::vector<dgt::Dataset> parts = dgt::split(gen.data, {0.8, 0.2}, 7);
  dgt::Dataset& train = parts[0];
  dgt::Dataset& test = parts[1];
  dgt::fit_apply_normalization(train, {&test});

  dgt::TrainConfig cfg;
  cfg.height = 2;
  cfg.epochs = 50;
  const dgt::TrainResult res = dgt::train_batch(train, cfg, dgt::OverparamSpec::single(), 7);

  const dgt::ObliqueTree tree = dgt::collapse(res.params);
  const auto predict = [&](const dgt::Vector& x) { return tree.predict(x); };
  std::cout << "final train loss " << res.log.back().train_loss << '\n';
  std::cout << "test rmse " << dgt::rmse(predict, test) << '\n';

  const dgt::PruneResult pruned = dgt::prune_unreached(tree, train.features);
  std::cout << "decision nodes after pruning " << pruned.report.kept_internal << '\n';
}
