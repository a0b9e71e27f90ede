#include "trident/matrix_hash.hpp"

#include <algorithm>
#include <charconv>

#include "trident/error.hpp"

namespace trident {

std::string ShuffleLabel::render() const {
    return std::to_string(point) + static_cast<char>(direction);
}

ShuffleLabel ShuffleLabel::parse(std::string_view text) {
    if (text.size() < 2) {
        throw Error(Errc::BadLabel, std::string(text));
    }
    const char dir = text.back();
    if (dir != 'F' && dir != 'R') {
        throw Error(Errc::BadLabel, std::string(text));
    }
    const std::string_view number = text.substr(0, text.size() - 1);
    std::uint32_t point = 0;
    const auto [end, ec] = std::from_chars(number.data(), number.data() + number.size(), point);
    if (ec != std::errc{} || end != number.data() + number.size() || point < 1 ||
        !std::all_of(number.begin(), number.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        throw Error(Errc::BadLabel, std::string(text));
    }
    return {point, static_cast<Direction>(dir)};
}

std::size_t Codebook::index_of(char login_char) {
    const auto pos = kLoginAlphabet.find(login_char);
    if (pos == std::string_view::npos) {
        throw Error(Errc::InvalidCharacter, std::string("'") + login_char + "' is not a login character");
    }
    return pos;
}

const CodebookEntry& Codebook::at(char login_char) const { return entries_[index_of(login_char)]; }

void Codebook::set(char login_char, CodebookEntry entry) {
    const std::size_t idx = index_of(login_char);
    if (entry.digit < kMinDigit || entry.digit > kMaxDigit ||
        entry.converted.size() != static_cast<std::size_t>(entry.digit) ||
        !std::all_of(entry.converted.begin(), entry.converted.end(), is_printable)) {
        throw Error(Errc::InvalidCharacter, "codebook entry violates digit/string invariants");
    }
    entries_[idx] = std::move(entry);
}

bool Codebook::complete() const noexcept {
    return std::all_of(entries_.begin(), entries_.end(), [](const CodebookEntry& e) {
        return e.digit >= kMinDigit && e.converted.size() == static_cast<std::size_t>(e.digit);
    });
}

Matrix::Matrix(std::vector<MatrixRow> rows) : rows_(std::move(rows)) {
    if (rows_.empty()) {
        throw Error(Errc::BadLength, "matrix needs at least one row");
    }
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const MatrixRow& r = rows_[i];
        if (!is_login_char(r.login_char)) {
            throw Error(Errc::InvalidCharacter, "matrix row holds a non-login character");
        }
        if (r.digit < kMinDigit || r.digit > kMaxDigit || r.converted.size() != static_cast<std::size_t>(r.digit)) {
            throw Error(Errc::BadLength, "matrix row digit does not match string length");
        }
        if ((i == 0) == r.label.has_value()) {
            throw Error(Errc::LabelCountMismatch, "row 1 carries no label; every later row carries one");
        }
    }
}

std::vector<ShuffleLabel> Matrix::labels() const {
    std::vector<ShuffleLabel> out;
    out.reserve(rows_.size() - 1);
    for (std::size_t i = 1; i < rows_.size(); ++i) {
        out.push_back(*rows_[i].label);
    }
    return out;
}

std::string_view column_name(Column column) noexcept {
    switch (column) {
        case Column::LoginChar: return "LOGIN_CHAR";
        case Column::Digit: return "DIGIT";
        case Column::String: return "STRING";
        case Column::Label: return "LABEL";
    }
    return "?";
}

std::optional<Column> parse_column(std::string_view name) noexcept {
    for (Column c : {Column::LoginChar, Column::Digit, Column::String, Column::Label}) {
        if (column_name(c) == name) {
            return c;
        }
    }
    return std::nullopt;
}

bool SelectionPlan::same_cell_set(const SelectionPlan& other) const {
    std::vector<Cell> a = cells;
    std::vector<Cell> b = other.cells;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
}

CodebookEntry draw_codebook_entry(EntropySource& rng) {
    CodebookEntry entry;
    entry.digit = static_cast<int>(rng.uniform_in(kMinDigit, kMaxDigit));
    entry.converted.reserve(static_cast<std::size_t>(entry.digit));
    for (int i = 0; i < entry.digit; ++i) {
        entry.converted.push_back(static_cast<char>(rng.uniform_in(kFirstPrintable, kLastPrintable)));
    }
    return entry;
}

Codebook generate_codebook(EntropySource& rng) {
    Codebook book;
    for (char c : kLoginAlphabet) {
        book.set(c, draw_codebook_entry(rng));
    }
    return book;
}

std::string apply_shuffle_step(std::string_view text, std::string_view insert, ShuffleLabel label) {
    // Point k inserts before the k-th character; points past the end append.
    const std::size_t point = std::min<std::size_t>(std::max<std::uint32_t>(label.point, 1), text.size() + 1);
    std::string out;
    out.reserve(text.size() + insert.size());
    out.append(text.substr(0, point - 1));
    if (label.direction == Direction::Forward) {
        out.append(insert);
    } else {
        out.append(insert.rbegin(), insert.rend());
    }
    out.append(text.substr(point - 1));
    return out;
}

ShuffleLabel draw_label(EntropySource& rng) {
    ShuffleLabel label;
    label.point = rng.uniform_in(1, kMaxDrawnLabelPoint);
    label.direction = rng.uniform(2) == 0 ? Direction::Forward : Direction::Reverse;
    return label;
}

std::vector<ShuffleLabel> draw_labels(EntropySource& rng, std::size_t count) {
    std::vector<ShuffleLabel> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(draw_label(rng));
    }
    return out;
}

namespace {

void check_credential(std::string_view credential) {
    if (credential.empty()) {
        throw Error(Errc::InvalidCharacter, "empty credential");
    }
    for (char c : credential) {
        if (!is_login_char(c)) {
            throw Error(Errc::InvalidCharacter, "credential contains a character outside a-z0-9");
        }
    }
}

}  // namespace

Matrix build_matrix(std::string_view credential, const Codebook& codebook, std::span<const ShuffleLabel> labels) {
    check_credential(credential);
    if (labels.size() != credential.size() - 1) {
        throw Error(Errc::LabelCountMismatch, "expected " + std::to_string(credential.size() - 1) + " labels, got " +
                                                  std::to_string(labels.size()));
    }
    std::vector<MatrixRow> rows;
    rows.reserve(credential.size());
    for (std::size_t i = 0; i < credential.size(); ++i) {
        const CodebookEntry& entry = codebook.at(credential[i]);
        MatrixRow row{credential[i], entry.digit, entry.converted, std::nullopt};
        if (i > 0) {
            row.label = labels[i - 1];
        }
        rows.push_back(std::move(row));
    }
    return Matrix(std::move(rows));
}

Matrix build_matrix(std::string_view credential, const Codebook& codebook, EntropySource& rng) {
    check_credential(credential);
    const auto labels = draw_labels(rng, credential.size() - 1);
    return build_matrix(credential, codebook, labels);
}

std::string compose_authentication_password(const Matrix& matrix) {
    std::string text = matrix.row(1).converted;
    for (std::size_t i = 2; i <= matrix.size(); ++i) {
        const MatrixRow& row = matrix.row(i);
        text = apply_shuffle_step(text, row.converted, *row.label);
    }
    return text;
}

std::size_t selectable_cells(std::size_t rows) noexcept { return rows == 0 ? 0 : 4 * rows - 1; }

SelectionPlan draw_selection_plan(EntropySource& rng, std::size_t matrix_rows) {
    if (matrix_rows == 0) {
        throw Error(Errc::PlanOutOfBounds, "matrix has no rows");
    }
    const std::size_t available = selectable_cells(matrix_rows);
    const std::size_t lo = std::min(kMinPlanCells, available);
    const std::size_t hi = std::min(kMaxPlanCells, available);

    std::vector<Cell> pool;
    pool.reserve(available);
    for (std::uint32_t r = 1; r <= matrix_rows; ++r) {
        for (Column c : {Column::LoginChar, Column::Digit, Column::String, Column::Label}) {
            if (r == 1 && c == Column::Label) {
                continue;
            }
            pool.push_back({r, c});
        }
    }

    // Rejection keeps the plan distribution uniform among plans with a STRING cell.
    for (;;) {
        const auto size = static_cast<std::size_t>(rng.uniform_in(static_cast<std::uint32_t>(lo),
                                                                   static_cast<std::uint32_t>(hi)));
        std::vector<Cell> remaining = pool;
        SelectionPlan plan;
        plan.cells.reserve(size);
        for (std::size_t i = 0; i < size; ++i) {
            const std::size_t pick = rng.uniform(static_cast<std::uint32_t>(remaining.size()));
            plan.cells.push_back(remaining[pick]);
            remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
        }
        const bool has_string = std::any_of(plan.cells.begin(), plan.cells.end(),
                                            [](const Cell& c) { return c.column == Column::String; });
        if (has_string) {
            return plan;
        }
    }
}

std::string extract_identifier(const Matrix& matrix, const SelectionPlan& plan) {
    std::string out;
    for (const Cell& cell : plan.cells) {
        if (cell.row < 1 || cell.row > matrix.size()) {
            throw Error(Errc::PlanOutOfBounds, "row " + std::to_string(cell.row) + " outside matrix of " +
                                                   std::to_string(matrix.size()) + " rows");
        }
        const MatrixRow& row = matrix.row(cell.row);
        switch (cell.column) {
            case Column::LoginChar: out.push_back(row.login_char); break;
            case Column::Digit: out.append(std::to_string(row.digit)); break;
            case Column::String: out.append(row.converted); break;
            case Column::Label:
                if (row.label) {
                    out.append(row.label->render());
                }
                break;
        }
    }
    return out;
}

std::string render_matrix(const Matrix& matrix) {
    std::string out;
    for (const MatrixRow& row : matrix.rows()) {
        out.push_back(row.login_char);
        out.push_back('\t');
        out.append(std::to_string(row.digit));
        out.push_back('\t');
        out.append(row.converted);
        out.push_back('\t');
        if (row.label) {
            out.append(row.label->render());
        }
        out.push_back('\n');
    }
    return out;
}

}  // namespace trident
