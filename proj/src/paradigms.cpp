#include "ragforge/paradigms.hpp"

#include <fstream>

#include "ragforge/jsonl.hpp"

namespace ragforge::paradigms {

namespace {

const char* kRuleR0 =
    "1. q* should be related to the <Documents>, but the <Documents> can not "
    "provide any useful information for answering q*.\n"
    "2. a* should be able to answer q*, ensuring that the response a* is "
    "accurate, detailed, and comprehensive.";

const char* kRuleR1 =
    "1. <Documents> can support q* by providing useful information or hints, "
    "but they do not contain explicit answers.\n"
    "2. a* should use useful information from <Documents> to aid in answering "
    "q*, ensuring that the response is accurate, detailed, and comprehensive.";

const char* kRuleR2 =
    "1. Multiple documents within <Documents> can support q* by providing "
    "useful information or hints, but they do not contain explicit answers.\n"
    "2. a* should use useful information from <Documents> to aid in answering "
    "q*, ensuring that the response is accurate, detailed, and comprehensive.";

const char* kRuleR3 =
    "1. Ensure that q* can be answered directly using the content of "
    "<Documents>, meaning its answer can be fully derived from <Documents>.\n"
    "2. a* should use the information from <Documents> to answer q* "
    "accurately, ensuring that the response is accurate, detailed, and "
    "comprehensive.";

const char* kRuleR4 =
    "1. The answer to q* can be derived from multiple documents within "
    "<Documents>, involving multi-hop reasoning or the integration of "
    "information from several documents.\n"
    "2. a* should leverage the information in <Documents> to provide an "
    "accurate answer to q*, ensuring that the response is accurate, detailed, "
    "and comprehensive.";

}  // namespace

std::string to_string(ParadigmId id) {
    switch (id) {
        case ParadigmId::R0: return "r0";
        case ParadigmId::R1: return "r1";
        case ParadigmId::R2: return "r2";
        case ParadigmId::R3: return "r3";
        case ParadigmId::R4: return "r4";
    }
    throw ParadigmError("bad paradigm id");
}

ParadigmId paradigm_from_string(const std::string& name) {
    for (ParadigmId id : kAllParadigms) {
        if (to_string(id) == name) return id;
    }
    throw ParadigmError("unknown paradigm \"" + name + "\"");
}

const std::vector<ParadigmSpec>& builtin_paradigms() {
    static const std::vector<ParadigmSpec> specs = {
        {ParadigmId::R0, Usefulness::Useless, 1, 1, kRuleR0},
        {ParadigmId::R1, Usefulness::Supporting, 1, 1, kRuleR1},
        {ParadigmId::R2, Usefulness::Supporting, 2, 4, kRuleR2},
        {ParadigmId::R3, Usefulness::Explicit, 1, 1, kRuleR3},
        {ParadigmId::R4, Usefulness::Explicit, 2, 4, kRuleR4},
    };
    return specs;
}

const ParadigmSpec& spec_for(ParadigmId id) {
    return builtin_paradigms()[static_cast<std::size_t>(id)];
}

void write_templates(const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& spec : builtin_paradigms()) {
        jsonl::write_file(dir / ("paradigm_" + to_string(spec.id) + ".txt"),
                          spec.rule_text);
    }
}

std::vector<ParadigmSpec> load_paradigms(const std::filesystem::path& dir) {
    std::vector<ParadigmSpec> specs = builtin_paradigms();
    for (auto& spec : specs) {
        auto file = dir / ("paradigm_" + to_string(spec.id) + ".txt");
        if (!std::filesystem::exists(file)) {
            throw ParadigmError("missing template file " + file.string());
        }
        spec.rule_text = jsonl::read_file(file);
        // Tolerate one trailing newline added by editors.
        if (!spec.rule_text.empty() && spec.rule_text.back() == '\n') {
            spec.rule_text.pop_back();
        }
    }
    return specs;
}

ParadigmDistribution ParadigmDistribution::uniform() {
    ParadigmDistribution dist;
    for (ParadigmId id : kAllParadigms) dist.weights[id] = 1.0;
    return dist;
}

ParadigmDistribution ParadigmDistribution::parse(const std::string& input) {
    if (input == "uniform" || input.empty()) return uniform();
    ParadigmDistribution dist;
    for (ParadigmId id : kAllParadigms) dist.weights[id] = 0.0;
    std::size_t at = 0;
    while (at < input.size()) {
        auto comma = input.find(',', at);
        std::string part = input.substr(
            at, comma == std::string::npos ? std::string::npos : comma - at);
        auto colon = part.find(':');
        if (colon == std::string::npos) {
            throw ParadigmError("bad distribution entry \"" + part +
                                "\" (want rK:weight)");
        }
        ParadigmId id = paradigm_from_string(part.substr(0, colon));
        double w = std::stod(part.substr(colon + 1));
        if (w < 0.0) {
            throw ParadigmError("negative weight for " + to_string(id));
        }
        dist.weights[id] = w;
        if (comma == std::string::npos) break;
        at = comma + 1;
    }
    return dist;
}

ParadigmId sample_paradigm(const ParadigmDistribution& dist,
                           rng::Stream& stream) {
    double total = 0.0;
    for (ParadigmId id : kAllParadigms) {
        auto it = dist.weights.find(id);
        if (it == dist.weights.end()) continue;
        if (it->second < 0.0) {
            throw ParadigmError("negative weight for " + to_string(id));
        }
        total += it->second;
    }
    if (total <= 0.0) {
        throw ParadigmError("paradigm distribution has no positive weight");
    }
    double draw = stream.next_double() * total;
    double acc = 0.0;
    for (ParadigmId id : kAllParadigms) {
        auto it = dist.weights.find(id);
        if (it == dist.weights.end()) continue;
        acc += it->second;
        if (draw < acc) return id;
    }
    return ParadigmId::R4;  // only reachable via rounding at draw == total
}

void validate_sources(const ParadigmSpec& spec,
                      const std::vector<corpus::Chunk>& sources) {
    auto n = static_cast<std::uint32_t>(sources.size());
    if (n < spec.min_sources || n > spec.max_sources) {
        throw ParadigmError("paradigm " + to_string(spec.id) + " needs " +
                            std::to_string(spec.min_sources) + ".." +
                            std::to_string(spec.max_sources) +
                            " source documents, got " + std::to_string(n));
    }
}

}  // namespace ragforge::paradigms
