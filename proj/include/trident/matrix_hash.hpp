#pragma once

// Matrix-like open hash: per-character conversion through a secret codebook,
// shuffle-label composition into an authentication password (AP), and
// identifier extraction from selected matrix cells.

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trident/entropy.hpp"

namespace trident {

/// Characters accepted in credentials after normalization.
inline constexpr std::string_view kLoginAlphabet = "abcdefghijklmnopqrstuvwxyz0123456789";

inline constexpr int kMinDigit = 1;
inline constexpr int kMaxDigit = 9;
inline constexpr char kFirstPrintable = 0x21;
inline constexpr char kLastPrintable = 0x7E;
inline constexpr std::uint32_t kMaxDrawnLabelPoint = 24;

constexpr bool is_login_char(char c) noexcept {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
}

constexpr bool is_printable(char c) noexcept {
    return c >= kFirstPrintable && c <= kLastPrintable;
}

enum class Direction : char { Forward = 'F', Reverse = 'R' };

struct ShuffleLabel {
    std::uint32_t point = 1;
    Direction direction = Direction::Forward;

    /// "4F", "16R".
    std::string render() const;

    /// Throws Error(Errc::BadLabel) unless text is decimal digits (value >= 1)
    /// followed by 'F' or 'R'.
    static ShuffleLabel parse(std::string_view text);

    friend bool operator==(const ShuffleLabel&, const ShuffleLabel&) = default;
};

struct CodebookEntry {
    int digit = 0;
    std::string converted;

    friend bool operator==(const CodebookEntry&, const CodebookEntry&) = default;
};

/// Secret table covering exactly the 36 login characters.
class Codebook {
public:
    /// Entries are default-initialized and must all be set before use.
    Codebook() = default;

    const CodebookEntry& at(char login_char) const;

    /// Validates digit range, digit == length and printable alphabet.
    void set(char login_char, CodebookEntry entry);

    /// True once every character has a valid entry.
    bool complete() const noexcept;

    friend bool operator==(const Codebook&, const Codebook&) = default;

private:
    static std::size_t index_of(char login_char);

    std::array<CodebookEntry, kLoginAlphabet.size()> entries_{};
};

struct MatrixRow {
    char login_char = 0;
    int digit = 0;
    std::string converted;
    std::optional<ShuffleLabel> label;  // empty only for row 1

    friend bool operator==(const MatrixRow&, const MatrixRow&) = default;
};

class Matrix {
public:
    explicit Matrix(std::vector<MatrixRow> rows);

    std::span<const MatrixRow> rows() const noexcept { return rows_; }
    std::size_t size() const noexcept { return rows_.size(); }

    /// 1-based.
    const MatrixRow& row(std::size_t index) const { return rows_.at(index - 1); }

    std::vector<ShuffleLabel> labels() const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::vector<MatrixRow> rows_;
};

enum class Column : std::uint8_t { LoginChar, Digit, String, Label };

std::string_view column_name(Column column) noexcept;
std::optional<Column> parse_column(std::string_view name) noexcept;

struct Cell {
    std::uint32_t row = 1;  // 1-based
    Column column = Column::String;

    friend auto operator<=>(const Cell&, const Cell&) = default;
};

struct SelectionPlan {
    std::vector<Cell> cells;

    /// Same cells regardless of order.
    bool same_cell_set(const SelectionPlan& other) const;

    friend bool operator==(const SelectionPlan&, const SelectionPlan&) = default;
};

inline constexpr std::size_t kMinPlanCells = 4;
inline constexpr std::size_t kMaxPlanCells = 8;

/// Independent draw per login character: digit uniform in 1..9, then that many
/// characters uniform over 0x21..0x7E.
Codebook generate_codebook(EntropySource& rng);
CodebookEntry draw_codebook_entry(EntropySource& rng);

std::string apply_shuffle_step(std::string_view text, std::string_view insert, ShuffleLabel label);

/// Point uniform in 1..24, direction uniform in {F, R}.
ShuffleLabel draw_label(EntropySource& rng);
std::vector<ShuffleLabel> draw_labels(EntropySource& rng, std::size_t count);

/// Login replay: labels are attached verbatim and must number length-1.
Matrix build_matrix(std::string_view credential, const Codebook& codebook,
                    std::span<const ShuffleLabel> labels);

/// Registration: labels are drawn from `rng`.
Matrix build_matrix(std::string_view credential, const Codebook& codebook, EntropySource& rng);

std::string compose_authentication_password(const Matrix& matrix);

/// Cells that render non-empty for a matrix of `rows` rows (row 1 has no label).
std::size_t selectable_cells(std::size_t rows) noexcept;

SelectionPlan draw_selection_plan(EntropySource& rng, std::size_t matrix_rows);

/// Throws Error(Errc::PlanOutOfBounds) if a cell is outside the matrix.
std::string extract_identifier(const Matrix& matrix, const SelectionPlan& plan);

/// One line per row: char TAB digit TAB string TAB label (empty label on row 1).
std::string render_matrix(const Matrix& matrix);

}  // namespace trident
