#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "volu/media_model.hpp"
#include "volu/rate_utility_optimizer.hpp"
#include "volu/utility_model.hpp"
#include "volu/view_geometry.hpp"
#include "volu/window_buffer.hpp"

namespace volu {

enum class Algorithm { kWba, kStrippedWba, kTba, kBba };

Algorithm parse_algorithm(const std::string& name);  // throws ConfigError
std::string to_string(Algorithm algorithm);

struct CbmConfig {
  Algorithm algorithm = Algorithm::kWba;
  double cycle = 0.5;            // T, seconds
  double smoothing = 0.75;       // w of the throughput filter
  double startup_seconds = 1.0;  // nu
  double tba_safety = 0.9;
  double bba_reservoir = 1.0;    // seconds
  double bba_cushion = 4.0;      // seconds
  double queue_cap = 30.0;       // TBA/BBA stop requesting above this occupancy
  int chunk_gofs = 1;            // GOFs per TBA/BBA request
  BudgetMode budget_mode = BudgetMode::kOvershoot;

  void validate() const;
};

// First-order autoregressive throughput filter. The first sample initializes
// the estimate directly.
class ThroughputEstimator {
 public:
  explicit ThroughputEstimator(double weight = 0.75);

  // Throws DomainError when elapsed <= 0.
  double update(double bits, double elapsed);
  double estimate() const { return estimate_; }
  bool initialized() const { return initialized_; }
  void set(double estimate);

 private:
  double weight_;
  double estimate_ = 0.0;
  bool initialized_ = false;
};

// Representation selectors; all return m in 1..M.
int stripped_wba_select(std::span<const double> ladder_bps, double throughput,
                        double cycle, double uncovered_media);
int tba_select(std::span<const double> ladder_bps, double throughput,
               double safety = 0.9);
int bba_select(std::span<const double> ladder_bps, double occupancy,
               double reservoir = 1.0, double cushion = 4.0);

struct IndexFetch {
  std::uint32_t object = 0;
  int segment = 0;
  double bits = 0.0;
};

struct TileRequest {
  TileKey key;
  int m = 0;
  int previous = 0;  // representation held when the plan was made
  double bits = 0.0;
  double media_time = 0.0;
};

// One multipart request: every requested tile of a (segment, representation)
// pair of one object.
struct RangeGroup {
  std::uint32_t object = 0;
  int segment = 0;
  int m = 0;
  std::string resource;
  std::vector<ByteRange> ranges;  // sorted, coalesced
  double bits = 0.0;
};

struct RequestPlan {
  double issued_at = 0.0;
  double estimate = 0.0;  // C at planning time
  double budget_bits = 0.0;
  double index_bits = 0.0;
  double tile_bits = 0.0;
  double final_lambda = 0.0;
  std::size_t upgrades = 0;  // tiles already holding a lower representation
  std::vector<IndexFetch> indexes;
  std::vector<TileRequest> tiles;  // delivery order
  std::vector<RangeGroup> groups;

  double total_bits() const { return index_bits + tile_bits; }
  bool empty() const { return indexes.empty() && tiles.empty(); }
  // Cumulative bit marks: one per index fetch, then one per tile.
  std::vector<double> cumulative_bits() const;
};

struct RequestLogRow {
  std::size_t i = 0;
  double t = 0.0;
  double estimate = 0.0;
  double budget_bits = 0.0;
  double planned_bits = 0.0;
  double index_bits = 0.0;
  std::size_t tiles = 0;
  std::size_t upgrades = 0;
  double final_lambda = 0.0;
};

void write_request_log_csv(std::ostream& out,
                           std::span<const RequestLogRow> rows);

// The client's decision engine. It owns the windowed buffer and acts as its
// own byte-range server over synthetic content.
class ClientBufferManager {
 public:
  ClientBufferManager(std::vector<SyntheticObject> sources,
                      std::vector<ObjectTimeline> timelines, CbmConfig config,
                      WindowConfig window = {}, PredictorConfig predictor = {});

  const CbmConfig& config() const { return config_; }
  WindowedBuffer& buffer() { return buffer_; }
  const WindowedBuffer& buffer() const { return buffer_; }
  ThroughputEstimator& estimator() { return estimator_; }
  const ThroughputEstimator& estimator() const { return estimator_; }
  const SyntheticObject& source(std::size_t object) const;
  std::size_t object_count() const { return sources_.size(); }
  const UtilityCoeffs& coeffs(std::size_t object) const;
  const PredictorConfig& predictor() const { return predictor_; }

  // Startup, step 1: manifests and the indexes covering the first nu seconds.
  RequestPlan startup_index_plan(double t);
  // Startup, step 2: lowest representation of every tile in those GOFs.
  RequestPlan startup_tile_plan(double t);
  // Declares t0 once the startup content has arrived.
  void start_playback(double t0);

  // The next request according to the configured algorithm.
  RequestPlan plan(double t, std::span<const Viewpoint> views);
  RequestPlan wba_step(double t, std::span<const Viewpoint> views);
  RequestPlan queue_step(double t);

  // Stores an arrived tile. Returns false for tiles whose GOF already played
  // on a non-looping object.
  bool deliver(const TileRequest& tile, double t);

  // Feeds the filter with a finished transfer and logs the request.
  void complete(const RequestPlan& plan, double started, double finished);

  // Media time up to which queue-mode requests have been issued.
  double queue_tail(std::size_t object) const { return tails_.at(object); }
  const std::vector<RequestLogRow>& request_log() const { return log_; }
  // Greedy steps of the latest WBA plan.
  const std::vector<TraceStep>& last_trace() const { return last_trace_; }

  // Bits of tile `tile_pos` of a GOF at representation m (1-based).
  static double tile_bits(const GofIndexEntry& gof, std::size_t tile_pos, int m);

 private:
  struct GofSpan {
    int pass = 0;
    int segment = 0;
    int gof = 0;
    double start = 0.0;
    double end = 0.0;
  };

  const SegmentIndex& source_index(std::size_t object, int segment);
  // GOFs with start in [from, to) on the unwrapped timeline.
  std::vector<GofSpan> gofs_between(std::size_t object, double from, double to);
  void fetch_index(RequestPlan& plan, std::size_t object, int segment);
  void fetch_indexes(RequestPlan& plan, std::size_t object, double from,
                     double to);
  void add_gof_tiles(RequestPlan& plan, std::size_t object, const GofSpan& g,
                     int m);
  void finalize(RequestPlan& plan) const;
  double queue_occupancy(double t, std::size_t object) const;

  std::vector<SyntheticObject> sources_;
  std::vector<std::map<int, SegmentIndex>> index_cache_;
  std::vector<UtilityCoeffs> coeffs_;
  CbmConfig config_;
  PredictorConfig predictor_;
  WindowedBuffer buffer_;
  ThroughputEstimator estimator_;
  std::vector<double> tails_;
  std::vector<RequestLogRow> log_;
  std::vector<TraceStep> last_trace_;
};

}  // namespace volu
