#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ragforge/corpus.hpp"
#include "ragforge/rng.hpp"

namespace ragforge::paradigms {

class ParadigmError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ParadigmId { R0, R1, R2, R3, R4 };

enum class Usefulness { Useless, Supporting, Explicit };

constexpr std::array<ParadigmId, 5> kAllParadigms = {
    ParadigmId::R0, ParadigmId::R1, ParadigmId::R2, ParadigmId::R3,
    ParadigmId::R4};

std::string to_string(ParadigmId id);
ParadigmId paradigm_from_string(const std::string& name);

/// One query-document relationship mode: how useful the source documents
/// are and how many of them the generated question must lean on, plus the
/// requirement block spliced into the synthesis prompt.
struct ParadigmSpec {
    ParadigmId id;
    Usefulness usefulness;
    std::uint32_t min_sources;
    std::uint32_t max_sources;
    std::string rule_text;
};

/// The five built-in paradigms:
///   r0 useless doc (1), r1 single-doc support (1), r2 multi-doc support
///   (2..4), r3 single-doc answer (1), r4 multi-doc answer (2..4).
const std::vector<ParadigmSpec>& builtin_paradigms();

const ParadigmSpec& spec_for(ParadigmId id);

/// Writes the five rule texts as UTF-8 files (paradigm_r0.txt .. r4.txt).
void write_templates(const std::filesystem::path& dir);

/// Loads rule texts from a templates directory, overriding the built-ins.
std::vector<ParadigmSpec> load_paradigms(const std::filesystem::path& dir);

struct ParadigmDistribution {
    std::map<ParadigmId, double> weights;

    static ParadigmDistribution uniform();
    /// Parses "r0:0.1,r1:0.3,..." or the literal "uniform".
    static ParadigmDistribution parse(const std::string& text);
};

/// Draws a paradigm id with the configured probabilities from the caller's
/// stream. All-zero (or negative) weights are rejected.
ParadigmId sample_paradigm(const ParadigmDistribution& dist,
                           rng::Stream& stream);

/// Enforces min_sources <= |sources| <= max_sources, naming the paradigm
/// and the offending count on failure.
void validate_sources(const ParadigmSpec& spec,
                      const std::vector<corpus::Chunk>& sources);

}  // namespace ragforge::paradigms
