#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "itn/error.hpp"
#include "itn/geo.hpp"
#include "itn/io/export.hpp"
#include "itn/synthetic.hpp"

namespace itn::io {

/// Writes a synthetic world as the three input CSVs (flows, countries,
/// dyads) in `dir`. Distances that follow from the coordinates are left blank.
inline void write_world(const synthetic::World& w, const std::string& dir, bool write_distances = false) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(std::filesystem::path(dir) / name, std::ios::binary);
    if (!out) throw Error("cannot write " + (std::filesystem::path(dir) / name).string());
    return out;
  };
  {
    auto out = open("countries.csv");
    out << "id,acronym,name,gdp,population,area_km2,landlocked,continent,region,cpi,latitude,longitude\n";
    for (const auto& c : w.countries)
      out << c.id << ',' << csv_field(c.acronym) << ',' << csv_field(c.name) << ',' << num(c.gdp) << ','
          << num(c.population) << ',' << num(c.area_km2) << ',' << (c.landlocked ? 1 : 0) << ',' << csv_field(c.continent)
          << ',' << csv_field(c.region) << ',' << num(c.cpi) << ',' << (c.latitude ? num(*c.latitude) : "") << ','
          << (c.longitude ? num(*c.longitude) : "") << '\n';
  }
  {
    auto out = open("flows.csv");
    out << "exporter_id,importer_id,year,value\n";
    for (std::size_t i = 0; i < w.flows.size(); ++i)
      for (std::size_t j = 0; j < w.flows.size(); ++j)
        if (i != j)
          out << w.countries[i].id << ',' << w.countries[j].id << ',' << w.flows.year() << ',' << num(w.flows(i, j)) << '\n';
  }
  {
    auto out = open("dyads.csv");
    out << "id_a,id_b,distance_km,contiguity,common_currency,common_language,colony,trade_agreement,common_religion,"
           "exchange_rate\n";
    for (std::size_t a = 0; a < w.countries.size(); ++a)
      for (std::size_t b = a + 1; b < w.countries.size(); ++b) {
        const auto& rec = *w.covariates.get(a, b);
        const auto& ca = w.countries[a];
        const auto& cb = w.countries[b];
        // distances the reader would not recompute from coordinates are written out
        bool write = write_distances;
        if (rec.distance_km && !write) {
          write = !ca.has_coordinates() || !cb.has_coordinates() ||
                  std::abs(*rec.distance_km - std::max(great_circle_km(*ca.latitude, *ca.longitude, *cb.latitude,
                                                                       *cb.longitude), 1.0)) > 1e-9 * *rec.distance_km;
        }
        out << ca.id << ',' << cb.id << ',' << (write && rec.distance_km ? num(*rec.distance_km) : "") << ',' << rec.contiguity << ','
            << rec.common_currency << ',' << rec.common_language << ',' << rec.colony << ',' << rec.trade_agreement << ','
            << rec.common_religion << ',' << num(rec.exchange_rate) << '\n';
      }
  }
}

}  // namespace itn::io
