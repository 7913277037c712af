#pragma once

#include <atomic>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "stripley/net.hpp"
#include "stripley/runtime.hpp"

namespace stripley::dist {

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
};

/// Parse "host:port".
Endpoint parse_endpoint(const std::string& text);

struct WorkerConfig {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;  // 0 = ephemeral; the bound port is announced
  /// Test hook: drop the connection after this many partials (-1 = never).
  int fail_after_partials = -1;
  /// Set to the bound port once listening (for in-process harnesses).
  std::atomic<std::uint16_t>* bound_port_out = nullptr;
};

/// Serve exactly one master session: handle Hello / Partitioner / batches /
/// Compute until Done or disconnect. Prints "LISTENING <port>" on stdout
/// once bound. Returns 0 on a clean session.
int serve_worker(const WorkerConfig& config);

/// Master-side executor over framed TCP connections to remote workers.
/// Tasks are assigned round-robin; a dead worker's unfinished tasks are
/// reassigned once to the remaining live workers.
class DistributedExecutor : public rt::Executor {
 public:
  DistributedExecutor(const std::vector<Endpoint>& endpoints,
                      const geom::StudyRegion& region, const rt::JobSpec& spec);
  ~DistributedExecutor() override;

  void broadcast_plan(const rt::JobPlan& plan) override;
  std::vector<rt::PartialResult> run(const std::vector<rt::TaskData>& tasks,
                                     bool simulation_phase) override;
  void collect_telemetry(rt::RunTelemetry& out) const override;

  std::size_t live_workers() const;

 private:
  struct Worker {
    net::Socket socket;
    bool alive = false;
    // Latest cumulative cache snapshot reported by this worker.
    cache::TableStats spatial_cache;
    cache::TableStats temporal_cache;
    std::uint64_t bytes_sent = 0;      // final counters of closed sockets
    std::uint64_t bytes_received = 0;
  };

  /// Send one task and wait for its partial. Throws on transport failure.
  rt::PartialResult run_task_on(std::size_t worker_slot, const rt::TaskData& task,
                                bool simulation_phase);
  void mark_dead(std::size_t worker_slot);

  std::vector<Worker> workers_;
  mutable std::mutex mutex_;
};

}  // namespace stripley::dist
