#ifndef IES_IO_RUNLOG_HPP
#define IES_IO_RUNLOG_HPP

// Line-delimited JSON run traces: one object per trace point. The last line of
// a run additionally carries best_x and the evaluation count.

#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ies/strategies.hpp"

namespace ies::io {

inline nlohmann::ordered_json instance_json(const InstanceDescriptor& d)
{
    nlohmann::ordered_json j;
    j["kind"] = std::string(to_string(d.kind));
    j["n"] = d.n;
    j["c"] = d.c;
    j["seed"] = d.seed;
    j["xi0"] = d.xi0;
    return j;
}

inline void write_run(std::ostream& out, const RunRecord& rec)
{
    for (std::size_t t = 0; t < rec.trace.size(); ++t) {
        nlohmann::ordered_json j;
        j["run_id"] = rec.run_id;
        j["seed"] = rec.seed;
        j["variant"] = std::string(to_string(rec.variant));
        if (rec.instance) {
            j["instance"] = instance_json(*rec.instance);
        } else {
            j["instance"] = nullptr;
        }
        j["eval"] = rec.trace[t].eval;
        j["best_f"] = rec.trace[t].best_f;
        if (t + 1 == rec.trace.size()) {
            j["evaluations"] = rec.evaluations;
            j["best_x"] = rec.best_x;
        }
        out << j.dump() << '\n';
    }
}

inline void write_run(const std::filesystem::path& path, const RunRecord& rec)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string());
    }
    write_run(out, rec);
}

class RunLogError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parse every run found in a JSONL stream, in order of first appearance.
inline std::vector<RunRecord> read_runs(std::istream& in)
{
    std::vector<RunRecord> runs;
    std::map<std::string, std::size_t> index;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
            const auto id = j.at("run_id").get<std::string>();
            auto [it, inserted] = index.try_emplace(id, runs.size());
            if (inserted) {
                RunRecord rec;
                rec.run_id = id;
                rec.seed = j.at("seed").get<std::uint64_t>();
                const auto variant = parse_variant(j.at("variant").get<std::string>());
                if (!variant) throw RunLogError("unknown variant");
                rec.variant = *variant;
                const auto& inst = j.at("instance");
                if (!inst.is_null()) {
                    InstanceDescriptor d;
                    const auto kind = parse_hessian_kind(inst.at("kind").get<std::string>());
                    if (!kind) throw RunLogError("unknown problem kind");
                    d.kind = *kind;
                    d.n = inst.at("n").get<std::size_t>();
                    d.c = inst.at("c").get<double>();
                    d.seed = inst.at("seed").get<std::uint64_t>();
                    d.xi0 = inst.at("xi0").get<IntegerVector>();
                    rec.instance = d;
                }
                runs.push_back(std::move(rec));
            }
            RunRecord& rec = runs[it->second];
            rec.trace.push_back({j.at("eval").get<std::uint64_t>(), j.at("best_f").get<double>()});
            rec.best_f = rec.trace.back().best_f;
            if (j.contains("best_x")) rec.best_x = j["best_x"].get<IntegerVector>();
            if (j.contains("evaluations")) rec.evaluations = j["evaluations"].get<std::uint64_t>();
        } catch (const nlohmann::json::exception& e) {
            throw RunLogError("malformed run log line " + std::to_string(line_no) + ": " + e.what());
        } catch (const RunLogError& e) {
            throw RunLogError("run log line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return runs;
}

} // namespace ies::io

#endif // IES_IO_RUNLOG_HPP
