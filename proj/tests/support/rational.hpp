#pragma once

#include <cstdint>
#include <stdexcept>

namespace testsup {

// Exact rational arithmetic on 128-bit integers. Used by test oracles so
// expected values are computed without any floating-point rounding. The
// numbers involved are tiny (counts in the thousands), so overflow is not a
// practical concern, but normalize() keeps terms small anyway.
struct Rat {
    __int128 num = 0;
    __int128 den = 1;

    Rat() = default;
    Rat(long long n) : num(n), den(1) {}
    Rat(long long n, long long d) : num(n), den(d) { normalize(); }

    static __int128 gcd128(__int128 a, __int128 b) {
        if (a < 0) a = -a;
        if (b < 0) b = -b;
        while (b != 0) {
            __int128 t = a % b;
            a = b;
            b = t;
        }
        return a;
    }

    void normalize() {
        if (den == 0) throw std::domain_error("rational with zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        __int128 g = gcd128(num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    friend Rat operator+(Rat a, Rat b) { return Rat128(a.num * b.den + b.num * a.den, a.den * b.den); }
    friend Rat operator-(Rat a, Rat b) { return Rat128(a.num * b.den - b.num * a.den, a.den * b.den); }
    friend Rat operator*(Rat a, Rat b) { return Rat128(a.num * b.num, a.den * b.den); }
    friend Rat operator/(Rat a, Rat b) {
        if (b.num == 0) throw std::domain_error("rational division by zero");
        return Rat128(a.num * b.den, a.den * b.num);
    }
    friend bool operator==(Rat a, Rat b) { return a.num == b.num && a.den == b.den; }
    friend bool operator!=(Rat a, Rat b) { return !(a == b); }
    friend bool operator<(Rat a, Rat b) { return a.num * b.den < b.num * a.den; }
    friend bool operator>(Rat a, Rat b) { return b < a; }

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

private:
    static Rat Rat128(__int128 n, __int128 d) {
        Rat r;
        r.num = n;
        r.den = d;
        r.normalize();
        return r;
    }
};

}  // namespace testsup
