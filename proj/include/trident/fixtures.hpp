#pragma once

// Worked examples: the six-character login password "dp7a3k" (composition) and
// the username "Benz428" (identifier extraction).

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "trident/matrix_hash.hpp"

namespace trident::fixtures {

inline constexpr std::string_view kFig1Password = "dp7a3k";
inline constexpr std::string_view kFig1Ap = "3MovQX#&(EPC9L$d?G%z";
inline constexpr std::string_view kFig1AfterFirstLabel = "3MovX#&(E";

inline constexpr std::string_view kFig2Email = "Benz428@woxinet.com";
inline constexpr std::string_view kFig2Identifier = "4O^&17R2zF=";

/// Converted strings of the composition example, keyed by login character.
std::vector<std::pair<char, CodebookEntry>> fig1_entries();
std::vector<ShuffleLabel> fig1_labels();
Matrix fig1_matrix();

std::vector<std::pair<char, CodebookEntry>> fig2_entries();
std::vector<ShuffleLabel> fig2_labels();
Matrix fig2_matrix();
SelectionPlan fig2_plan();

/// A complete codebook containing `entries`, other characters filled from a
/// deterministic stream.
Codebook codebook_with(const std::vector<std::pair<char, CodebookEntry>>& entries);

/// Bytes that make generate_codebook() return `book` when replayed.
std::vector<std::uint8_t> encode_codebook(const Codebook& book);
std::vector<std::uint8_t> encode_labels(const std::vector<ShuffleLabel>& labels);

/// Registration entropy whose LP field reproduces the composition example matrix: a fixed
/// salt, the example codebook, then labels 4F,16R,13F,13R,5F.
std::vector<std::uint8_t> fig1_registration_entropy();

}  // namespace trident::fixtures
