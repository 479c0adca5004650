#pragma once

#include <span>
#include <vector>

#include "cafe/causal.hpp"
#include "cafe/config.hpp"
#include "cafe/dataset.hpp"
#include "cafe/drift.hpp"
#include "cafe/metrics.hpp"
#include "cafe/model.hpp"
#include "cafe/optim.hpp"
#include "cafe/rng.hpp"

namespace cafe {

// Round orchestration: label partitioning, availability-driven client
// selection, local training for each supported method, server aggregation,
// and the full experiment loop.

struct Partition {
  std::vector<std::vector<int>> client_indices;  // disjoint, covering
  Matrix class_histograms;                       // clients x classes
  Vec weights;                                   // data share per client, sums to 1
};

// Per class, a Dirichlet(concentration) draw over clients fixes that class's
// allocation proportions; samples are dealt out by largest remainder. Clients
// left empty are repaired by taking one sample from the currently largest
// client.
Partition dirichlet_partition(const std::vector<int>& labels, int num_classes, int clients,
                              double concentration, Rng& rng);

// Availability probabilities linearly spaced from cf (client 0, slowest) up
// to 1.0 (client K-1). cf = 1 makes every client always available.
struct ParticipationModel {
  Vec freq;
};

ParticipationModel build_participation(int clients, double cf);

// Draw a candidate pool of ceil(sample_rate * K) clients uniformly, then keep
// each candidate with its availability probability; redrawn whole when the
// result is empty. Returned ascending.
std::vector<int> select_round_clients(const ParticipationModel& model, double sample_rate,
                                      Rng& rng);

// One client's upload for a round.
struct ClientUpdate {
  int client = 0;
  double weight = 0.0;     // data share of this client
  Vec update;              // accumulated gradient: (params_in - params_out) / lr
  double delta_norm = 0.0; // norm of the raw parameter displacement
  DriftAccumulators drift_contribution;  // this round's global-drift statistic (cafe)
  bool has_drift = false;
  int round = 0;
  bool valid = false;  // false when the client was skipped (empty shard)
};

// Local training for one selected client: the round's global model is copied
// in, local_epochs mini-batch steps run under the method's loss, and the
// accumulated gradient is returned. Cafe clients also report their
// global-drift contribution.
ClientUpdate client_local_train(const ExperimentConfig& cfg, const ModelConfig& mcfg,
                                const ModelParams& global_params, const Dataset& train,
                                std::span<const int> shard, double weight,
                                const DriftDirections& server_dirs, int round, Rng& rng);

// Fold the round's updates into the global model. fedavg/fedprox weight the
// updates by data share renormalized over the participants; cafe/cosavg use
// the plain mean. The momentum state applies the shared recurrence.
void server_aggregate(const std::vector<ClientUpdate>& updates, Method method,
                      GlobalMomentum& momentum, ModelParams& global_params);

struct EvalResult {
  double acc = 0.0;
  double loss = 0.0;
  Vec per_class_acc;
};

// Test-set evaluation under the method's own scoring rule (softmax logits for
// fedavg/fedprox, cosine scores for cosavg, the deconfounded inference rule
// for cafe).
EvalResult evaluate(const ExperimentConfig& cfg, const ModelConfig& mcfg,
                    const ModelParams& params, const DriftDirections& server_dirs,
                    const Dataset& test);

struct RoundRecord {
  int round = 0;
  std::vector<int> selected;
  Vec delta_norms;
  double aggregate_norm = 0.0;
  double secs = 0.0;  // measured wall time, lives only in the round log
};

struct ExperimentResult {
  std::vector<MetricsRow> metrics;  // row 0 is the initial model, then one per round
  std::vector<RoundRecord> rounds;
  ModelConfig model_config;
  ModelParams final_params;
  DriftDirections final_dirs;
  InferenceHead head;
  Partition partition;
};

// The full loop: R rounds of select -> broadcast -> local train -> aggregate,
// with a metrics row appended after every round. Every output is a pure
// function of the config.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace cafe
