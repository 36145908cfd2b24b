#include "pmrhc/output.hpp"

#include <cstdio>
#include <map>
#include <sstream>

namespace pmrhc {

namespace {

std::string exact(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_trace(std::ostream& os, const SimulationResult& r) {
    os << "time,kind,agent,target,R\n";
    for (const EventRecord& e : r.events)
        os << exact(e.time) << ',' << to_string(e.kind) << ',' << e.agent << ',' << e.target << ',' << exact(e.R)
           << '\n';
}

std::string trace_csv(const SimulationResult& r) {
    std::ostringstream os;
    write_trace(os, r);
    return os.str();
}

void write_trajectories(std::ostream& os, const SimulationResult& r) {
    os << "target,t0,R0,rate\n";
    for (std::size_t i = 0; i < r.segments.size(); ++i)
        for (const Segment& s : r.segments[i])
            os << i << ',' << exact(s.t0) << ',' << exact(s.R0) << ',' << exact(s.rate) << '\n';
}

nlohmann::json result_summary(const SimulationResult& r, int agents) {
    nlohmann::json j;
    j["J_T"] = r.J_T;
    j["T"] = r.T;
    j["processed_events"] = r.processed_events;
    std::map<std::string, int> counts;
    for (const EventRecord& e : r.events) ++counts[to_string(e.kind)];
    j["event_counts"] = counts;
    j["decisions"] = r.decisions.size();
    nlohmann::json seq = nlohmann::json::array();
    for (int a = 0; a < agents; ++a) seq.push_back(r.visit_sequence(a));
    j["visit_sequences"] = seq;
    j["final_R"] = r.final_R;
    return j;
}

}  // namespace pmrhc
