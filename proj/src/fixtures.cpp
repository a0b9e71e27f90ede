#include "trident/fixtures.hpp"

#include <string>

namespace trident::fixtures {

namespace {

std::vector<ShuffleLabel> parse_labels(std::initializer_list<std::string_view> texts) {
    std::vector<ShuffleLabel> out;
    for (std::string_view t : texts) {
        out.push_back(ShuffleLabel::parse(t));
    }
    return out;
}

}  // namespace

std::vector<std::pair<char, CodebookEntry>> fig1_entries() {
    return {{'d', {6, "3Mo&(E"}}, {'p', {3, "vX#"}}, {'7', {5, "z%9CP"}},
            {'a', {2, "?G"}},     {'3', {3, "d$L"}}, {'k', {1, "Q"}}};
}

std::vector<ShuffleLabel> fig1_labels() { return parse_labels({"4F", "16R", "13F", "13R", "5F"}); }

Matrix fig1_matrix() { return build_matrix(kFig1Password, codebook_with(fig1_entries()), fig1_labels()); }

std::vector<std::pair<char, CodebookEntry>> fig2_entries() {
    return {{'b', {3, "y]Q"}}, {'e', {5, "#ws%8"}}, {'n', {3, "O^&"}}, {'z', {2, "$d"}},
            {'4', {3, ")Lh"}}, {'2', {3, "zF="}},   {'8', {1, "m"}}};
}

std::vector<ShuffleLabel> fig2_labels() { return parse_labels({"5F", "9R", "17R", "13F", "8F", "11F"}); }

Matrix fig2_matrix() { return build_matrix("benz428", codebook_with(fig2_entries()), fig2_labels()); }

SelectionPlan fig2_plan() {
    return SelectionPlan{{{5, Column::LoginChar}, {3, Column::String}, {4, Column::Label}, {6, Column::LoginChar},
                          {6, Column::String}}};
}

Codebook codebook_with(const std::vector<std::pair<char, CodebookEntry>>& entries) {
    const std::string seed = "trident fixture filler";
    ReplayEntropy filler(std::vector<std::uint8_t>(seed.begin(), seed.end()));
    Codebook book = generate_codebook(filler);
    for (const auto& [c, entry] : entries) {
        book.set(c, entry);
    }
    return book;
}

std::vector<std::uint8_t> encode_codebook(const Codebook& book) {
    std::vector<std::uint8_t> out;
    for (char c : kLoginAlphabet) {
        const CodebookEntry& e = book.at(c);
        out.push_back(static_cast<std::uint8_t>(e.digit - kMinDigit));
        for (char s : e.converted) {
            out.push_back(static_cast<std::uint8_t>(s - kFirstPrintable));
        }
    }
    return out;
}

std::vector<std::uint8_t> encode_labels(const std::vector<ShuffleLabel>& labels) {
    std::vector<std::uint8_t> out;
    for (const ShuffleLabel& l : labels) {
        out.push_back(static_cast<std::uint8_t>(l.point - 1));
        out.push_back(l.direction == Direction::Forward ? 0 : 1);
    }
    return out;
}

std::vector<std::uint8_t> fig1_registration_entropy() {
    std::vector<std::uint8_t> out;
    for (std::uint8_t i = 0; i < 16; ++i) {
        out.push_back(static_cast<std::uint8_t>(0xA0 + i));  // salt
    }
    const auto book = encode_codebook(codebook_with(fig1_entries()));
    out.insert(out.end(), book.begin(), book.end());
    const auto labels = encode_labels(fig1_labels());
    out.insert(out.end(), labels.begin(), labels.end());
    return out;
}

}  // namespace trident::fixtures
