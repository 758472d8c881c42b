#include "core/csv.hpp"

#include <charconv>
#include <cmath>

namespace coalflow {

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

void line(std::string& out, std::initializer_list<std::string> cells) {
  bool first = true;
  for (const auto& c : cells) {
    if (!first) out += ',';
    out += c;
    first = false;
  }
  out += '\n';
}

}  // namespace

std::string render_path_record_csv(const PathRecord& record) {
  std::string out = kCsvSchemaLine;
  out += "\ntime,particle_id,position,cluster_rep\n";
  for (std::size_t row = 0; row < record.times.size(); ++row) {
    for (const auto& path : record.paths) {
      if (row < path.first_index) continue;
      const std::size_t i = row - path.first_index;
      if (i >= path.x.size()) continue;
      line(out, {format_double(record.times[row]), std::to_string(path.id),
                 format_double(path.x[i]), std::to_string(path.rep[i])});
    }
  }
  return out;
}

std::string render_merge_events_csv(const std::vector<MergeEvent>& events) {
  std::string out = kCsvSchemaLine;
  out += "\ntime,survivor,absorbed\n";
  for (const auto& e : events) {
    line(out, {format_double(e.time), std::to_string(e.survivor),
               std::to_string(e.absorbed)});
  }
  return out;
}

std::string render_split_record_csv(const SplitPathRecord& record) {
  std::string out = kCsvSchemaLine;
  out += "\ntime,particle_id,X,m,is_partition_point,jump\n";
  const auto& bp = record.partition.breakpoints;
  for (std::size_t row = 0; row < record.times.size(); ++row) {
    const bool pp = record.is_partition_point[row] != 0;
    // jump column is nonzero only on interior post-jump rows
    std::size_t jump_index = 0;
    if (pp && record.times[row] > 0.0 && record.times[row] < 1.0) {
      for (std::size_t k = 1; k + 1 < bp.size(); ++k) {
        if (bp[k] == record.times[row]) {
          jump_index = k;
          break;
        }
      }
    }
    for (const auto& path : record.particles) {
      const double jump = jump_index > 0 ? path.jumps[jump_index] : 0.0;
      line(out, {format_double(record.times[row]), std::to_string(path.id),
                 format_double(path.x[row]), format_double(path.m[row]),
                 pp ? "1" : "0", format_double(jump)});
    }
  }
  return out;
}

std::string render_meeting_samples_csv(
    const std::vector<MeetingSample>& samples) {
  std::string out = kCsvSchemaLine;
  out += "\nreplica,met,time\n";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    line(out, {std::to_string(i), samples[i].met ? "1" : "0",
               format_double(samples[i].time)});
  }
  return out;
}

std::string render_cluster_estimates_csv(
    const std::vector<ClusterEstimate>& rows) {
  std::string out = kCsvSchemaLine;
  out += "\nt,method,value,stderr,reps\n";
  for (const auto& r : rows) {
    line(out, {format_double(r.t),
               r.method == ClusterMethod::pair_quadrature ? "pair-quadrature"
                                                          : "fan",
               format_double(r.value), format_double(r.stderr_),
               std::to_string(r.reps)});
  }
  return out;
}

std::string render_sandwich_record_csv(const SandwichRecord& record) {
  std::string out = kCsvSchemaLine;
  out += "\ntime,xi1,dxi,eta,eta_tilde\n";
  for (std::size_t i = 0; i < record.times.size(); ++i) {
    line(out, {format_double(record.times[i]), format_double(record.xi1[i]),
               format_double(record.dxi[i]), format_double(record.eta[i]),
               format_double(record.eta_tilde[i])});
  }
  return out;
}

}  // namespace coalflow
