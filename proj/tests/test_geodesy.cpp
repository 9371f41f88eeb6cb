#include "tds/error.hpp"
#include "tds/geodesy.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace tds;
using namespace tds::geodesy;

namespace {

// Independent great-circle oracle: angle between unit sphere vectors.
double great_circle_oracle_m(const GeodeticPosition& a, const GeodeticPosition& b) {
    auto unit = [](const GeodeticPosition& p) {
        double la = deg2rad(p.latitude_deg), lo = deg2rad(p.longitude_deg);
        return Vec3{std::cos(la) * std::cos(lo), std::cos(la) * std::sin(lo), std::sin(la)};
    };
    Vec3 u = unit(a), v = unit(b);
    return kMeanEarthRadius * std::atan2(u.cross(v).norm(), u.dot(v));
}

} // namespace

TEST_SUITE_BEGIN("geodesy");

TEST_CASE("lla_to_ecef identities") {
    EcefVector e = lla_to_ecef({0, 0, 0, Datum::ELLIPSOID_WGS84});
    CHECK(e.x == doctest::Approx(6378137.0).epsilon(1e-12));
    CHECK(std::abs(e.y) < 1e-9);
    CHECK(std::abs(e.z) < 1e-9);

    EcefVector pole = lla_to_ecef({90, 0, 0, Datum::ELLIPSOID_WGS84});
    CHECK(std::abs(pole.x) < 1e-6);
    CHECK(std::abs(pole.y) < 1e-6);
    CHECK(pole.z == doctest::Approx(6356752.314245179).epsilon(1e-12));
}

TEST_CASE("lla_to_ecef rejects AMSL") {
    CHECK_THROWS_AS(lla_to_ecef({10, 10, 100, Datum::AMSL}), DatumError);
}

TEST_CASE("ecef_to_lla identities and axis symmetry") {
    GeodeticPosition p = ecef_to_lla({6378137.0, 0, 0});
    CHECK(std::abs(p.latitude_deg) < 1e-12);
    CHECK(std::abs(p.longitude_deg) < 1e-12);
    CHECK(std::abs(p.altitude_m) < 1e-6);

    GeodeticPosition q = ecef_to_lla({0, 6378137.0, 0});
    CHECK(std::abs(q.latitude_deg) < 1e-12);
    CHECK(q.longitude_deg == doctest::Approx(90.0).epsilon(1e-12));

    CHECK_THROWS_AS(ecef_to_lla({1000, 0, 0}), ValidationError);
}

TEST_CASE("lla<->ecef roundtrip over random surface points") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> lat(-89.5, 89.5);
    std::uniform_real_distribution<double> lon(-180.0, 180.0);
    std::uniform_real_distribution<double> alt(-100.0, 9000.0);
    double max_deg = 0, max_alt = 0;
    for (int i = 0; i < 1000; ++i) {
        GeodeticPosition p(lat(rng), lon(rng), alt(rng), Datum::ELLIPSOID_WGS84);
        GeodeticPosition r = ecef_to_lla(lla_to_ecef(p));
        max_deg = std::max({max_deg, std::abs(r.latitude_deg - p.latitude_deg),
                            std::abs(r.longitude_deg - p.longitude_deg)});
        max_alt = std::max(max_alt, std::abs(r.altitude_m - p.altitude_m));
    }
    CHECK(max_deg <= 1e-9);
    CHECK(max_alt <= 1e-4);
}

TEST_CASE("tangent frame basis is orthonormal, up along ellipsoid normal") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> lat(-89.0, 89.0);
    std::uniform_real_distribution<double> lon(-180.0, 180.0);
    for (int i = 0; i < 50; ++i) {
        GeodeticPosition p(lat(rng), lon(rng), 150.0, Datum::ELLIPSOID_WGS84);
        TangentFrame f = frame_at(p);
        for (int r = 0; r < 3; ++r) {
            CHECK(std::abs(f.ecef_to_enu.row(r).norm() - 1.0) < 1e-12);
            for (int s = r + 1; s < 3; ++s)
                CHECK(std::abs(f.ecef_to_enu.row(r).dot(f.ecef_to_enu.row(s))) < 1e-12);
        }
        // ellipsoid normal at p
        double la = deg2rad(p.latitude_deg), lo = deg2rad(p.longitude_deg);
        Vec3 n{std::cos(la) * std::cos(lo), std::cos(la) * std::sin(lo), std::sin(la)};
        CHECK(f.ecef_to_enu.row(2).dot(n) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("to_enu basics") {
    GeodeticPosition origin(36.2, -96.0, 195.0, Datum::ELLIPSOID_WGS84);
    TangentFrame f = frame_at(origin);

    Vec3 zero = to_enu(f, origin);
    CHECK(zero.norm() < 1e-9);

    // point built 100 m along the frame's north axis in ECEF
    Vec3 n = f.ecef_to_enu.row(1);
    EcefVector oe = lla_to_ecef(origin);
    GeodeticPosition north100 = ecef_to_lla({oe.x + 100 * n.x, oe.y + 100 * n.y, oe.z + 100 * n.z});
    Vec3 enu = to_enu(f, north100);
    CHECK(std::abs(enu.x) < 1e-3);
    CHECK(enu.y == doctest::Approx(100.0).epsilon(1e-5));
    CHECK(std::abs(enu.z) < 1e-3);

    GeodeticPosition below(36.2, -96.0, 181.0, Datum::ELLIPSOID_WGS84);
    Vec3 d = to_enu(f, below);
    CHECK(std::abs(d.x) < 1e-3);
    CHECK(std::abs(d.y) < 1e-3);
    CHECK(d.z == doctest::Approx(-14.0).epsilon(1e-6));

    GeodeticPosition amsl(36.2, -96.0, 181.0, Datum::AMSL);
    CHECK_THROWS_AS(to_enu(f, amsl), DatumError);
}

TEST_CASE("enu roundtrip up to 10 km") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> lat(-80.0, 80.0);
    std::uniform_real_distribution<double> lon(-180.0, 180.0);
    std::uniform_real_distribution<double> off(-10000.0, 10000.0);
    double worst = 0;
    for (int i = 0; i < 200; ++i) {
        GeodeticPosition origin(lat(rng), lon(rng), 200.0, Datum::ELLIPSOID_WGS84);
        TangentFrame f = frame_at(origin);
        Vec3 v{off(rng), off(rng), off(rng) / 100.0};
        Vec3 back = to_enu(f, from_enu(f, v));
        worst = std::max(worst, (back - v).norm());
    }
    CHECK(worst <= 1e-4);
}

TEST_CASE("haversine distance") {
    GeodeticPosition a(36.212189, -96.006905, 195.0, Datum::ELLIPSOID_WGS84);
    CHECK(haversine_m(a, a) == 0.0);

    GeodeticPosition b(36.21290054231726, -96.0083389306795, 181.0, Datum::ELLIPSOID_WGS84);
    double d = haversine_m(a, b);
    double oracle = great_circle_oracle_m(a, b);
    CHECK(d == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(d == doctest::Approx(151.03).epsilon(1e-3)); // the anchor pair sits ~151 m apart

    std::mt19937 rng(5);
    std::uniform_real_distribution<double> lat(-89.0, 89.0);
    std::uniform_real_distribution<double> lon(-180.0, 180.0);
    for (int i = 0; i < 100; ++i) {
        GeodeticPosition p(lat(rng), lon(rng), 0);
        GeodeticPosition q(lat(rng), lon(rng), 0);
        CHECK(haversine_m(p, q) == haversine_m(q, p));
    }
}

TEST_CASE("haversine triangle inequality") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> lat(-89.0, 89.0);
    std::uniform_real_distribution<double> lon(-180.0, 180.0);
    for (int i = 0; i < 200; ++i) {
        GeodeticPosition a(lat(rng), lon(rng), 0);
        GeodeticPosition b(lat(rng), lon(rng), 0);
        GeodeticPosition c(lat(rng), lon(rng), 0);
        CHECK(haversine_m(a, c) <= haversine_m(a, b) + haversine_m(b, c) + 1e-6);
    }
}

TEST_CASE("datum_convert") {
    GeodeticPosition p(36.2, -96.0, 100.0, Datum::AMSL);
    GeodeticPosition e0 = datum_convert(p, 0.0, Datum::ELLIPSOID_WGS84);
    CHECK(e0.altitude_m == 100.0);
    CHECK(e0.datum == Datum::ELLIPSOID_WGS84);

    GeodeticPosition e = datum_convert(p, -28.0, Datum::ELLIPSOID_WGS84);
    CHECK(e.altitude_m == 72.0);
    CHECK(e.latitude_deg == p.latitude_deg);

    GeodeticPosition back = datum_convert(e, -28.0, Datum::AMSL);
    CHECK(back.altitude_m == p.altitude_m);
    CHECK(back.datum == Datum::AMSL);

    // same-datum conversion is the identity
    CHECK(datum_convert(p, -28.0, Datum::AMSL).altitude_m == p.altitude_m);
}

TEST_CASE("geodetic position validation") {
    CHECK_THROWS_AS(GeodeticPosition(91.0, 0, 0), ValidationError);
    GeodeticPosition wrapped(10.0, 190.0, 0);
    CHECK(wrapped.longitude_deg == doctest::Approx(-170.0));
}

TEST_SUITE_END();
