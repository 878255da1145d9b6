#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "expmapkit/core.hpp"
#include "expmapkit/errors.hpp"
#include "expmapkit/tower.hpp"

namespace expmapkit {

/// External address s_0 s_1 s_2 ...: finite prefix plus a Constant or
/// Periodic tail rule. Carries the minimal bound witness x_s >= 0 with
/// 2 pi |s_j| <= exp^j(x_s) for all j.
class ExternalAddress {
public:
    struct ConstantTail {
        long long value;
    };
    struct PeriodicTail {
        std::vector<long long> word;  // nonempty
    };
    using Tail = std::variant<ConstantTail, PeriodicTail>;

    ExternalAddress(std::vector<long long> prefix, Tail tail)
        : prefix_(std::move(prefix)), tail_(std::move(tail)) {
        if (auto* p = std::get_if<PeriodicTail>(&tail_); p && p->word.empty())
            throw InvalidInput("ExternalAddress: periodic tail word is empty");
        canonicalize();
        witness_ = compute_witness();
    }

    static ExternalAddress constant(long long k) {
        return ExternalAddress({}, ConstantTail{k});
    }
    static ExternalAddress periodic(std::vector<long long> word) {
        return ExternalAddress({}, PeriodicTail{std::move(word)});
    }

    long long entry(std::size_t j) const {
        if (j < prefix_.size()) return prefix_[j];
        std::size_t i = j - prefix_.size();
        if (auto* c = std::get_if<ConstantTail>(&tail_)) return c->value;
        const auto& w = std::get<PeriodicTail>(tail_).word;
        return w[i % w.size()];
    }

    const std::vector<long long>& prefix() const { return prefix_; }
    const Tail& tail() const { return tail_; }

    /// Minimal x_s with 2 pi |s_j| <= exp^j(x_s) for all j.
    double bound_witness() const { return witness_; }

    /// Shift sigma: drop s_0.
    ExternalAddress shifted() const {
        if (!prefix_.empty()) {
            std::vector<long long> p(prefix_.begin() + 1, prefix_.end());
            return ExternalAddress(std::move(p), tail_);
        }
        if (std::holds_alternative<ConstantTail>(tail_)) return *this;
        auto w = std::get<PeriodicTail>(tail_).word;
        std::rotate(w.begin(), w.begin() + 1, w.end());
        return ExternalAddress({}, PeriodicTail{std::move(w)});
    }

    /// Address with c added to s_0; entries j >= 1 are unchanged.
    ExternalAddress with_first_offset(long long c) const {
        ExternalAddress rest = shifted();
        std::vector<long long> p;
        p.reserve(rest.prefix_.size() + 1);
        p.push_back(entry(0) + c);
        p.insert(p.end(), rest.prefix_.begin(), rest.prefix_.end());
        return ExternalAddress(std::move(p), rest.tail_);
    }

    /// Entrywise negation (conjugate address).
    ExternalAddress negated() const {
        std::vector<long long> p = prefix_;
        for (auto& e : p) e = -e;
        Tail t = tail_;
        if (auto* c = std::get_if<ConstantTail>(&t)) {
            c->value = -c->value;
        } else {
            for (auto& e : std::get<PeriodicTail>(t).word) e = -e;
        }
        return ExternalAddress(std::move(p), t);
    }

    /// Spec format "s0,s1,...;const:k" or "s0,...;per:w0,w1,...".
    /// The prefix part may be empty ("const:0" and ";const:0" both parse).
    static ExternalAddress parse(const std::string& text) {
        std::string prefix_part, tail_part;
        auto semi = text.find(';');
        if (semi == std::string::npos) {
            tail_part = text;
        } else {
            prefix_part = text.substr(0, semi);
            tail_part = text.substr(semi + 1);
        }
        std::vector<long long> prefix;
        if (!prefix_part.empty()) prefix = parse_int_list(prefix_part);
        if (tail_part.rfind("const:", 0) == 0) {
            auto v = parse_int_list(tail_part.substr(6));
            if (v.size() != 1)
                throw InvalidInput("address: const tail needs one integer");
            return ExternalAddress(std::move(prefix), ConstantTail{v[0]});
        }
        if (tail_part.rfind("per:", 0) == 0) {
            auto w = parse_int_list(tail_part.substr(4));
            if (w.empty())
                throw InvalidInput("address: periodic tail needs a word");
            return ExternalAddress(std::move(prefix), PeriodicTail{std::move(w)});
        }
        throw InvalidInput("address: tail must be 'const:k' or 'per:w0,w1,...'");
    }

    std::string to_string() const {
        std::ostringstream os;
        for (std::size_t i = 0; i < prefix_.size(); ++i) {
            if (i) os << ',';
            os << prefix_[i];
        }
        if (!prefix_.empty()) os << ';';
        if (auto* c = std::get_if<ConstantTail>(&tail_)) {
            os << "const:" << c->value;
        } else {
            os << "per:";
            const auto& w = std::get<PeriodicTail>(tail_).word;
            for (std::size_t i = 0; i < w.size(); ++i) {
                if (i) os << ',';
                os << w[i];
            }
        }
        return os.str();
    }

    /// 2 pi |s_j| <= exp^j(x) for all j up to j_max, checked in tower form.
    bool witness_holds(double x, std::size_t j_max) const {
        for (std::size_t j = 0; j <= j_max; ++j) {
            auto lhs = TowerMagnitude::from_value(
                kTwoPi * std::abs(static_cast<double>(entry(j))));
            if (tower_cmp(lhs, iterated_exp(x, static_cast<int>(j))) ==
                Ordering::Greater)
                return false;
        }
        return true;
    }

private:
    static std::vector<long long> parse_int_list(const std::string& text) {
        std::vector<long long> out;
        std::istringstream is(text);
        std::string tok;
        while (std::getline(is, tok, ',')) {
            if (tok.empty())
                throw InvalidInput("address: empty integer token");
            std::size_t pos = 0;
            long long v;
            try {
                v = std::stoll(tok, &pos);
            } catch (const std::exception&) {
                throw InvalidInput("address: bad integer '" + tok + "'");
            }
            if (pos != tok.size())
                throw InvalidInput("address: bad integer '" + tok + "'");
            out.push_back(v);
        }
        if (out.empty() && !text.empty())
            throw InvalidInput("address: bad integer list '" + text + "'");
        return out;
    }

    // Absorb prefix entries that the tail rule already produces, so equal
    // sequences compare equal entrywise and print identically.
    void canonicalize() {
        if (auto* c = std::get_if<ConstantTail>(&tail_)) {
            while (!prefix_.empty() && prefix_.back() == c->value)
                prefix_.pop_back();
            return;
        }
        auto& w = std::get<PeriodicTail>(tail_).word;
        while (!prefix_.empty() && prefix_.back() == w.back()) {
            prefix_.pop_back();
            std::rotate(w.begin(), w.end() - 1, w.end());
        }
    }

    double compute_witness() const {
        // iterated_log_need is nonincreasing in j for fixed v, so the sup is
        // attained within the prefix plus one full tail period.
        std::size_t period = 1;
        if (auto* p = std::get_if<PeriodicTail>(&tail_)) period = p->word.size();
        double x = 0.0;
        for (std::size_t j = 0; j < prefix_.size() + period; ++j) {
            double v = kTwoPi * std::abs(static_cast<double>(entry(j)));
            if (v <= 0.0) continue;
            x = std::max(x, iterated_log_need(v, static_cast<int>(j)));
        }
        return x;
    }

    std::vector<long long> prefix_;
    Tail tail_;
    double witness_ = 0.0;
};

}  // namespace expmapkit
