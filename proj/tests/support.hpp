#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "oracles.hpp"
#include "trident/gatekeeper.hpp"
#include "trident/identity.hpp"
#include "trident/matrix_hash.hpp"

namespace trident::test {

inline std::string random_printable(std::mt19937_64& gen, std::size_t n) {
    std::uniform_int_distribution<int> ch(kFirstPrintable, kLastPrintable);
    std::string s;
    for (std::size_t i = 0; i < n; ++i) {
        s.push_back(static_cast<char>(ch(gen)));
    }
    return s;
}

inline std::string random_login(std::mt19937_64& gen, std::size_t n, bool letter_first = false) {
    std::uniform_int_distribution<std::size_t> pick(0, kLoginAlphabet.size() - 1);
    std::uniform_int_distribution<std::size_t> letter(0, 25);
    std::string s;
    for (std::size_t i = 0; i < n; ++i) {
        s.push_back(i == 0 && letter_first ? kLoginAlphabet[letter(gen)] : kLoginAlphabet[pick(gen)]);
    }
    return s;
}

inline std::string random_digits(std::mt19937_64& gen, std::size_t n) {
    std::uniform_int_distribution<int> d(0, 9);
    std::string s;
    for (std::size_t i = 0; i < n; ++i) {
        s.push_back(static_cast<char>('0' + d(gen)));
    }
    return s;
}

inline std::string random_luhn_imei(std::mt19937_64& gen) {
    std::string prefix = random_digits(gen, 14);
    return prefix + luhn_check_digit(prefix);
}

/// A random matrix (n rows, digits 1..max_digit) together with its oracle rows.
struct RandomMatrix {
    Matrix matrix;
    std::vector<OracleRow> oracle;
};

inline RandomMatrix random_matrix(std::mt19937_64& gen, std::size_t max_rows, int max_digit) {
    std::uniform_int_distribution<std::size_t> rows_dist(1, max_rows);
    std::uniform_int_distribution<int> digit_dist(1, max_digit);
    std::uniform_int_distribution<unsigned> point_dist(1, kMaxDrawnLabelPoint);
    std::bernoulli_distribution reverse_dist(0.5);
    std::uniform_int_distribution<std::size_t> char_dist(0, kLoginAlphabet.size() - 1);

    const std::size_t n = rows_dist(gen);
    std::vector<MatrixRow> rows;
    std::vector<OracleRow> oracle;
    for (std::size_t i = 0; i < n; ++i) {
        const int digit = digit_dist(gen);
        MatrixRow row{kLoginAlphabet[char_dist(gen)], digit, random_printable(gen, static_cast<std::size_t>(digit)),
                      std::nullopt};
        OracleRow o{row.converted};
        if (i > 0) {
            o.point = point_dist(gen);
            o.reverse = reverse_dist(gen);
            row.label = ShuffleLabel{o.point, o.reverse ? Direction::Reverse : Direction::Forward};
        }
        rows.push_back(std::move(row));
        oracle.push_back(std::move(o));
    }
    return {Matrix(std::move(rows)), std::move(oracle)};
}

inline RegistrationRequest random_request(std::mt19937_64& gen, bool with_phone = false) {
    std::uniform_int_distribution<std::size_t> name_len(4, 12);
    std::uniform_int_distribution<std::size_t> lp_len(kMinLoginPasswordLength, kMaxLoginPasswordLength);
    RegistrationRequest r{random_login(gen, name_len(gen), true), std::nullopt, random_login(gen, lp_len(gen)),
                          Imei::parse(random_luhn_imei(gen)), Imsi::parse(random_digits(gen, 15))};
    if (with_phone) {
        r.phone_raw = "9" + random_digits(gen, 10);
    }
    return r;
}

/// Unique temp directory removed on destruction.
class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("trident-test-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace trident::test
