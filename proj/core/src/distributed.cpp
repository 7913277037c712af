#include "stripley/distributed.hpp"

#include <cstdio>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "stripley/protocol.hpp"

namespace stripley::dist {

Endpoint parse_endpoint(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("endpoint must be host:port, got " + text);
  Endpoint ep;
  ep.host = text.substr(0, colon);
  const int port = std::stoi(text.substr(colon + 1));
  if (port < 0 || port > 65535) throw std::invalid_argument("invalid port in " + text);
  ep.port = static_cast<std::uint16_t>(port);
  return ep;
}

int serve_worker(const WorkerConfig& config) {
  auto listener = net::Listener::bind_on(config.host, config.port);
  if (config.bound_port_out) config.bound_port_out->store(listener.port());
  std::printf("LISTENING %u\n", listener.port());
  std::fflush(stdout);
  auto sock = listener.accept_one();

  std::optional<geom::StudyRegion> region;
  est::DistanceGrid grid;
  est::EstimatorOptions options;
  std::optional<cache::WeightCache> weight_cache;
  std::optional<part::KDBPartitioner> partitioner;
  std::unordered_map<std::uint32_t, rt::TaskData> pending;
  int partials_sent = 0;

  try {
    for (;;) {
      std::vector<std::uint8_t> payload;
      try {
        payload = net::recv_frame(sock);
      } catch (const std::exception&) {
        return 0;  // master went away; session over
      }
      switch (proto::message_type(payload)) {
        case proto::MsgType::Hello: {
          const auto hello = proto::decode_hello(payload);
          region.emplace(hello.ring, hello.period_start, hello.period_end);
          grid = hello.grid;
          options = hello.options;
          if (options.use_cache)
            weight_cache.emplace(options.coord_tolerance, options.dist_tolerance);
          else
            weight_cache.reset();
          pending.clear();
          break;
        }
        case proto::MsgType::Partitioner:
          partitioner = proto::decode_partitioner_msg(payload);
          break;
        case proto::MsgType::PointBatch: {
          auto batch = proto::decode_point_batch(payload);
          auto& task = pending[batch.task_id];
          task.task_id = batch.task_id;
          task.points = std::move(batch.points);
          break;
        }
        case proto::MsgType::CylinderBatch: {
          auto batch = proto::decode_cylinder_batch(payload);
          auto& task = pending[batch.task_id];
          task.task_id = batch.task_id;
          task.cylinders = std::move(batch.cylinders);
          break;
        }
        case proto::MsgType::Compute: {
          const auto compute = proto::decode_compute(payload);
          if (!region) throw std::runtime_error("Compute before Hello");
          const auto it = pending.find(compute.task_id);
          if (it == pending.end())
            throw std::runtime_error("Compute for unknown task");
          if (compute.simulation_phase && weight_cache) weight_cache->freeze();
          auto partial = rt::execute_task(it->second, *region, grid, options,
                                          weight_cache ? &*weight_cache : nullptr);
          pending.erase(it);
          net::send_frame(sock, proto::encode_partial(partial));
          ++partials_sent;
          if (config.fail_after_partials >= 0 &&
              partials_sent >= config.fail_after_partials) {
            sock.close();  // injected failure
            return 0;
          }
          break;
        }
        case proto::MsgType::Done:
          return 0;
        case proto::MsgType::Error:
          std::fprintf(stderr, "worker: master error: %s\n",
                       proto::decode_error(payload).c_str());
          return 1;
        default:
          throw std::runtime_error("unexpected message");
      }
    }
  } catch (const std::exception& e) {
    try {
      net::send_frame(sock, proto::encode_error(e.what()));
    } catch (...) {
    }
    std::fprintf(stderr, "worker: %s\n", e.what());
    return 1;
  }
}

DistributedExecutor::DistributedExecutor(const std::vector<Endpoint>& endpoints,
                                         const geom::StudyRegion& region,
                                         const rt::JobSpec& spec) {
  if (endpoints.empty()) throw std::invalid_argument("no worker endpoints");
  proto::Hello hello;
  hello.ring = region.boundary();
  hello.period_start = region.period_start();
  hello.period_end = region.period_end();
  hello.grid = spec.grid;
  hello.options = spec.options;
  hello.time_unit = spec.time_unit;
  const auto hello_bytes = proto::encode_hello(hello);
  for (const auto& ep : endpoints) {
    Worker w;
    w.socket = net::Socket::connect_to(ep.host, ep.port);
    net::send_frame(w.socket, hello_bytes);
    w.alive = true;
    workers_.push_back(std::move(w));
  }
}

DistributedExecutor::~DistributedExecutor() {
  for (auto& w : workers_) {
    if (!w.alive) continue;
    try {
      net::send_frame(w.socket, proto::encode_done());
    } catch (...) {
    }
  }
}

void DistributedExecutor::broadcast_plan(const rt::JobPlan& plan) {
  if (plan.choice != rt::PartitionerChoice::Kdb) return;
  const auto bytes = proto::encode_partitioner_msg(*plan.kdb);
  for (std::size_t i = 0; i < workers_.size(); ++i) {
    if (!workers_[i].alive) continue;
    try {
      net::send_frame(workers_[i].socket, bytes);
    } catch (const std::exception&) {
      mark_dead(i);
    }
  }
}

rt::PartialResult DistributedExecutor::run_task_on(std::size_t worker_slot,
                                                   const rt::TaskData& task,
                                                   bool simulation_phase) {
  auto& worker = workers_[worker_slot];
  proto::PointBatch points{task.task_id, task.points};
  proto::CylinderBatch cyls{task.task_id, task.cylinders};
  net::send_frame(worker.socket, proto::encode_point_batch(points));
  net::send_frame(worker.socket, proto::encode_cylinder_batch(cyls));
  net::send_frame(worker.socket, proto::encode_compute({task.task_id, simulation_phase}));
  const auto payload = net::recv_frame(worker.socket);
  const auto type = proto::message_type(payload);
  if (type == proto::MsgType::Error)
    throw std::runtime_error("worker error: " + proto::decode_error(payload));
  if (type != proto::MsgType::Partial)
    throw std::runtime_error("unexpected reply from worker");
  auto partial = proto::decode_partial(payload);
  if (partial.task_id != task.task_id)
    throw std::runtime_error("worker replied for wrong task");
  partial.worker_id = static_cast<std::uint32_t>(worker_slot);
  {
    std::lock_guard lock(mutex_);
    worker.spatial_cache = partial.spatial_cache;
    worker.temporal_cache = partial.temporal_cache;
  }
  return partial;
}

void DistributedExecutor::mark_dead(std::size_t worker_slot) {
  std::lock_guard lock(mutex_);
  auto& w = workers_[worker_slot];
  if (!w.alive) return;
  w.alive = false;
  w.bytes_sent = w.socket.bytes_sent();
  w.bytes_received = w.socket.bytes_received();
  w.socket.close();
}

std::vector<rt::PartialResult> DistributedExecutor::run(
    const std::vector<rt::TaskData>& tasks, bool simulation_phase) {
  std::vector<rt::PartialResult> partials;
  partials.reserve(tasks.size());
  std::mutex partials_mutex;

  // Two passes: the initial assignment, then one reassignment round for
  // tasks stranded on a dead worker.
  std::vector<const rt::TaskData*> remaining;
  for (const auto& t : tasks) remaining.push_back(&t);

  for (int attempt = 0; attempt < 2 && !remaining.empty(); ++attempt) {
    std::vector<std::size_t> live;
    for (std::size_t i = 0; i < workers_.size(); ++i)
      if (workers_[i].alive) live.push_back(i);
    if (live.empty()) throw std::runtime_error("no live workers left");

    std::vector<std::vector<const rt::TaskData*>> assigned(live.size());
    for (std::size_t i = 0; i < remaining.size(); ++i)
      assigned[i % live.size()].push_back(remaining[i]);

    std::vector<std::vector<const rt::TaskData*>> failed(live.size());
    std::vector<std::thread> threads;
    for (std::size_t s = 0; s < live.size(); ++s) {
      threads.emplace_back([&, s] {
        for (std::size_t k = 0; k < assigned[s].size(); ++k) {
          const rt::TaskData* task = assigned[s][k];
          try {
            auto partial = run_task_on(live[s], *task, simulation_phase);
            std::lock_guard lock(partials_mutex);
            partials.push_back(std::move(partial));
          } catch (const std::exception&) {
            mark_dead(live[s]);
            for (std::size_t r = k; r < assigned[s].size(); ++r)
              failed[s].push_back(assigned[s][r]);
            return;
          }
        }
      });
    }
    for (auto& th : threads) th.join();

    remaining.clear();
    for (const auto& f : failed) remaining.insert(remaining.end(), f.begin(), f.end());
    if (attempt == 1 && !remaining.empty())
      throw std::runtime_error("task failed after reassignment; retry budget exhausted");
  }
  return partials;
}

void DistributedExecutor::collect_telemetry(rt::RunTelemetry& out) const {
  std::lock_guard lock(mutex_);
  for (const auto& w : workers_) {
    out.spatial_cache += w.spatial_cache;
    out.temporal_cache += w.temporal_cache;
    out.bytes_sent += w.alive ? w.socket.bytes_sent() : w.bytes_sent;
    out.bytes_received += w.alive ? w.socket.bytes_received() : w.bytes_received;
  }
}

std::size_t DistributedExecutor::live_workers() const {
  std::lock_guard lock(mutex_);
  std::size_t n = 0;
  for (const auto& w : workers_) n += w.alive ? 1 : 0;
  return n;
}

}  // namespace stripley::dist
