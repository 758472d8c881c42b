#include "core/web.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace coalflow {

namespace {

// Above this exponent the bridge-meet probability is < 5e-18; the test (and
// its uniform draw) is skipped.
constexpr double kBridgeExponentCutoff = 40.0;

}  // namespace

double bridge_meet_prob(double d0, double d1, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("bridge_meet_prob: h must be > 0");
  if (!(d0 > 0.0) || !(d1 > 0.0)) {
    throw std::invalid_argument("bridge_meet_prob: gaps must be > 0");
  }
  return std::exp(-d0 * d1 / h);
}

std::int64_t even_step_count(double from, double to, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step size must be > 0");
  const double len = to - from;
  if (!(len > 0.0)) return 0;
  // The slack absorbs quotient rounding when len is an exact multiple of dt.
  const auto n = static_cast<std::int64_t>(
      std::ceil(len / dt * (1.0 - 1e-12)));
  return std::max<std::int64_t>(n, 1);
}

WebEngine::WebEngine(double start_time, const DriftModel* drift)
    : time_(start_time), drift_(drift) {}

void WebEngine::rebuild_index() {
  std::fill(cluster_index_.begin(), cluster_index_.end(), -1);
  for (std::size_t i = 0; i < clusters_.size(); ++i) {
    for (int id : clusters_[i].members) {
      cluster_index_[static_cast<std::size_t>(id)] = static_cast<int>(i);
    }
  }
}

int WebEngine::spawn(double position) {
  const int id = next_id_++;
  cluster_index_.push_back(-1);
  // A birth at exactly a live particle's position joins that cluster: the
  // path through a point is unique.
  for (auto& c : clusters_) {
    if (c.pos == position) {
      c.members.push_back(id);
      c.rep = std::min(c.rep, id);
      rebuild_index();
      return id;
    }
  }
  Cluster fresh{id, position, {id}};
  const auto it = std::upper_bound(
      clusters_.begin(), clusters_.end(), position,
      [](double p, const Cluster& c) { return p < c.pos; });
  clusters_.insert(it, std::move(fresh));
  rebuild_index();
  return id;
}

void WebEngine::merge_into(std::size_t dst, std::size_t src) {
  Cluster& a = clusters_[dst];
  Cluster& b = clusters_[src];
  const int survivor = std::min(a.rep, b.rep);
  const int absorbed = std::max(a.rep, b.rep);
  const double pos = (a.rep == survivor) ? a.pos : b.pos;
  events_.push_back({time_, survivor, absorbed});
  a.members.insert(a.members.end(), b.members.begin(), b.members.end());
  a.rep = survivor;
  a.pos = pos;
  clusters_.erase(clusters_.begin() + static_cast<std::ptrdiff_t>(src));
}

void WebEngine::enforce_order() {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i + 1 < clusters_.size(); ++i) {
      if (!(clusters_[i + 1].pos > clusters_[i].pos)) {
        merge_into(i, i + 1);
        changed = true;
        break;
      }
    }
  }
}

void WebEngine::advance(double h, RngStream& gauss, RngStream& bridge) {
  if (!(h > 0.0)) throw std::invalid_argument("advance: h must be > 0");
  const std::size_t m = clusters_.size();
  const double sq = std::sqrt(h);
  start_pos_.resize(m);
  for (std::size_t i = 0; i < m; ++i) start_pos_[i] = clusters_[i].pos;
  for (std::size_t i = 0; i < m; ++i) {
    double next = clusters_[i].pos + sq * gauss.next_gaussian();
    if (drift_ != nullptr) next += drift_->eval(clusters_[i].pos) * h;
    clusters_[i].pos = next;
  }
  time_ += h;
  if (m < 2) return;

  // Pair decisions use each pair's own start/end gaps, left to right.
  merge_flags_.assign(m, 0);
  bool any = false;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const double d0 = start_pos_[i + 1] - start_pos_[i];
    const double d1 = clusters_[i + 1].pos - clusters_[i].pos;
    if (d1 <= 0.0) {
      merge_flags_[i] = 1;
    } else {
      const double x = d0 * d1 / h;
      if (x <= kBridgeExponentCutoff) {
        merge_flags_[i] = bridge.next_uniform() < std::exp(-x);
      }
    }
    any = any || merge_flags_[i];
  }
  // no merge: all adjacent end gaps are positive, order and index stand
  if (!any) return;
  collapse(merge_flags_);
  enforce_order();
  rebuild_index();
}

void WebEngine::collapse(std::vector<char>& merge_with_next) {
  std::vector<Cluster> merged;
  merged.reserve(clusters_.size());
  std::size_t i = 0;
  while (i < clusters_.size()) {
    std::size_t j = i;
    while (j + 1 < clusters_.size() && merge_with_next[j]) ++j;
    Cluster group = std::move(clusters_[i]);
    for (std::size_t k = i + 1; k <= j; ++k) {
      Cluster& c = clusters_[k];
      const int survivor = std::min(group.rep, c.rep);
      const int absorbed = std::max(group.rep, c.rep);
      const double pos = (group.rep == survivor) ? group.pos : c.pos;
      events_.push_back({time_, survivor, absorbed});
      group.members.insert(group.members.end(), c.members.begin(),
                           c.members.end());
      group.rep = survivor;
      group.pos = pos;
    }
    merged.push_back(std::move(group));
    i = j + 1;
  }
  clusters_ = std::move(merged);
}

void WebEngine::advance_to(double target, double dt, RngStream& gauss,
                           RngStream& bridge) {
  if (target < time_) throw std::invalid_argument("advance_to: target in past");
  const std::int64_t n = even_step_count(time_, target, dt);
  if (n == 0) return;
  const double h = (target - time_) / static_cast<double>(n);
  for (std::int64_t k = 0; k < n; ++k) advance(h, gauss, bridge);
  time_ = target;  // pin the grid point exactly
}

void WebEngine::map_positions(const std::function<double(double)>& f) {
  for (auto& c : clusters_) c.pos = f(c.pos);
}

void WebEngine::drop(int particle) {
  const auto pid = static_cast<std::size_t>(particle);
  if (pid >= cluster_index_.size() || cluster_index_[pid] < 0) {
    throw std::invalid_argument("drop: unknown or already dropped particle");
  }
  auto& c = clusters_[static_cast<std::size_t>(cluster_index_[pid])];
  c.members.erase(std::find(c.members.begin(), c.members.end(), particle));
  if (c.members.empty()) {
    clusters_.erase(clusters_.begin() + cluster_index_[pid]);
  } else if (c.rep == particle) {
    c.rep = *std::min_element(c.members.begin(), c.members.end());
  }
  cluster_index_[pid] = -1;
  rebuild_index();
}

double WebEngine::position(int particle) const {
  const int slot = cluster_index_.at(static_cast<std::size_t>(particle));
  if (slot < 0) throw std::invalid_argument("position: dropped particle");
  return clusters_[static_cast<std::size_t>(slot)].pos;
}

int WebEngine::cluster_rep(int particle) const {
  const int slot = cluster_index_.at(static_cast<std::size_t>(particle));
  if (slot < 0) throw std::invalid_argument("cluster_rep: dropped particle");
  return clusters_[static_cast<std::size_t>(slot)].rep;
}

bool WebEngine::is_live(int particle) const {
  const auto pid = static_cast<std::size_t>(particle);
  return pid < cluster_index_.size() && cluster_index_[pid] >= 0;
}

namespace {

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

PathRecord evaluate_flow(const std::vector<Birth>& births,
                         const std::vector<double>& eval_times, double horizon,
                         double dt, RngStream& gauss, RngStream& bridge,
                         RecordMode mode) {
  return record_flow(births, eval_times, horizon, dt, gauss, bridge, mode,
                     nullptr);
}

PathRecord record_flow(const std::vector<Birth>& births,
                       const std::vector<double>& eval_times, double horizon,
                       double dt, RngStream& gauss, RngStream& bridge,
                       RecordMode mode, const DriftModel* drift) {
  if (births.empty()) throw std::invalid_argument("evaluate_flow: no births");
  if (!(dt > 0.0)) throw std::invalid_argument("evaluate_flow: dt must be > 0");
  double max_birth = -std::numeric_limits<double>::infinity();
  double min_birth = std::numeric_limits<double>::infinity();
  for (const auto& b : births) {
    if (b.time < 0.0 || b.time > horizon) {
      throw std::invalid_argument("evaluate_flow: birth time outside horizon");
    }
    max_birth = std::max(max_birth, b.time);
    min_birth = std::min(min_birth, b.time);
  }
  for (double e : eval_times) {
    if (e > horizon) {
      throw std::invalid_argument("evaluate_flow: eval time beyond horizon");
    }
    if (e < max_birth) {
      throw std::invalid_argument(
          "evaluate_flow: eval time earlier than a particle's birth");
    }
  }

  std::vector<double> event_times;
  event_times.reserve(births.size() + eval_times.size());
  for (const auto& b : births) event_times.push_back(b.time);
  for (double e : eval_times) event_times.push_back(e);
  event_times = sorted_unique(event_times);

  const auto is_eval = [&](double t) {
    return std::find(eval_times.begin(), eval_times.end(), t) !=
           eval_times.end();
  };

  PathRecord rec;
  rec.paths.resize(births.size());
  WebEngine engine(min_birth, drift);
  std::vector<int> ids(births.size(), -1);

  const auto record_row = [&](double t) {
    rec.times.push_back(t);
    for (std::size_t p = 0; p < births.size(); ++p) {
      if (ids[p] < 0) continue;
      auto& path = rec.paths[p];
      if (path.x.empty()) path.first_index = rec.times.size() - 1;
      path.x.push_back(engine.position(ids[p]));
      path.rep.push_back(engine.cluster_rep(ids[p]));
    }
  };

  double t = min_birth;
  for (std::size_t e = 0; e < event_times.size(); ++e) {
    const double target = event_times[e];
    if (target > t) {
      const std::int64_t n = even_step_count(t, target, dt);
      const double h = (target - t) / static_cast<double>(n);
      for (std::int64_t k = 0; k < n; ++k) {
        engine.advance(h, gauss, bridge);
        if (mode == RecordMode::full_grid && k + 1 < n) {
          record_row(t + static_cast<double>(k + 1) * h);
        }
      }
      t = target;
    }
    for (std::size_t p = 0; p < births.size(); ++p) {
      if (ids[p] < 0 && births[p].time == target) {
        ids[p] = engine.spawn(births[p].position);
        rec.paths[p].id = ids[p];
        rec.paths[p].birth = births[p];
      }
    }
    if (mode == RecordMode::full_grid || is_eval(target)) record_row(target);
  }
  rec.events = engine.events();
  return rec;
}

MeetingSample pair_meeting_kernel(double u1, double u2, const DriftModel& drift,
                                  double horizon, double dt, RngStream& gauss,
                                  RngStream& bridge) {
  if (u1 > u2) throw std::invalid_argument("pair meeting: requires u1 <= u2");
  if (u1 == u2) return {true, 0.0};
  const std::int64_t n = even_step_count(0.0, horizon, dt);
  const double h = horizon / static_cast<double>(n);
  const double sq = std::sqrt(h);
  const bool zero = drift.is_zero();
  double x1 = u1, x2 = u2;
  for (std::int64_t i = 0; i < n; ++i) {
    const double d0 = x2 - x1;
    double n1 = x1 + sq * gauss.next_gaussian();
    double n2 = x2 + sq * gauss.next_gaussian();
    if (!zero) {
      n1 += drift.eval(x1) * h;
      n2 += drift.eval(x2) * h;
    }
    x1 = n1;
    x2 = n2;
    const double d1 = x2 - x1;
    bool met = d1 <= 0.0;
    if (!met) {
      const double x = d0 * d1 / h;
      if (x <= kBridgeExponentCutoff) {
        met = bridge.next_uniform() < std::exp(-x);
      }
    }
    if (met) return {true, static_cast<double>(i + 1) * h};
  }
  return {};
}

}  // namespace coalflow
