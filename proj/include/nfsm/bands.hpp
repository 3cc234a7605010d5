#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "experiments.hpp"

namespace nfsm::experiments
{

/// Closed interval a seed-mean must fall in.
struct Band
{
  double lo = 0.0;
  double hi = 0.0;

  bool contains( double v ) const { return v >= lo && v <= hi; }
  static Band exactly( double v ) { return { v, v }; }
  static Band around( double center, double tolerance ) { return { center - tolerance, center + tolerance }; }
};

/// Reference accuracy band for the trained parity acceptor at length T.
inline std::optional<Band> thm1_band( std::size_t length )
{
  if ( length >= 1 && length <= 7 )
    return Band::exactly( 1.0 );
  switch ( length )
  {
  case 8: return Band::around( 0.9975, 0.05 );
  case 9: return Band::around( 0.9942, 0.05 );
  case 10: return Band::around( 0.9817, 0.05 );
  default: return std::nullopt;
  }
}

inline std::optional<Band> lemma1_band( std::size_t n, std::size_t k )
{
  if ( n >= 1 && n <= 8 && k >= 1 && k <= 3 )
    return Band::exactly( 1.0 );
  return std::nullopt;
}

inline std::optional<Band> lemma2_band( std::size_t n )
{
  switch ( n )
  {
  case 2:
  case 4: return Band::exactly( 1.0 );
  case 8: return Band::around( 0.9781, 0.08 );
  case 16: return Band::around( 0.9202, 0.08 );
  case 32: return Band::around( 0.9320, 0.08 );
  default: return std::nullopt;
  }
}

inline std::optional<Band> thm2_band( std::size_t length )
{
  if ( length >= 1 && length <= 6 )
    return Band::exactly( 1.0 );
  switch ( length )
  {
  case 7: return Band::around( 0.9877, 0.05 );
  case 8: return Band::around( 0.9890, 0.05 );
  case 9: return Band::around( 0.9958, 0.05 );
  case 10: return Band::around( 0.9283, 0.12 );
  default: return std::nullopt;
  }
}

inline std::optional<Band> cor21_band( std::size_t n )
{
  switch ( n )
  {
  case 2: return Band::around( 0.8639, 0.05 );
  case 4: return Band::around( 0.9956, 0.05 );
  case 8: return Band::around( 0.9961, 0.05 );
  default: return std::nullopt;
  }
}

inline Band thm3_band() { return { 0.40, 0.65 }; }

/// Held-out means above this mean the fixed-size network generalized, contradicting the negative result.
inline constexpr double thm3_failure_threshold = 0.8;

struct BandCheck
{
  std::string config;
  std::string metric;
  double mean = 0.0;
  Band band;
  bool pass = false;
};

namespace detail
{

/// Reads "key=<number>" out of a config label such as "n=4,k=2".
inline std::optional<std::size_t> config_value( const std::string& config, const std::string& key )
{
  const auto at = config.find( key + "=" );
  if ( at == std::string::npos || ( at > 0 && config[at - 1] != ',' ) )
    return std::nullopt;
  return static_cast<std::size_t>( std::stoull( config.substr( at + key.size() + 1 ) ) );
}

} // namespace detail

/// Checks every configuration of a report that has a reference band.
inline std::vector<BandCheck> check_bands( const ExperimentReport& report )
{
  std::vector<BandCheck> out;
  for ( const auto& config : report.configs )
  {
    std::optional<Band> band;
    std::string metric = "accuracy";
    if ( report.name == "thm1" )
      band = thm1_band( *detail::config_value( config, "T" ) );
    else if ( report.name == "thm2" )
      band = thm2_band( *detail::config_value( config, "T" ) );
    else if ( report.name == "lemma1" )
      band = lemma1_band( *detail::config_value( config, "n" ), *detail::config_value( config, "k" ) );
    else if ( report.name == "lemma2" )
      band = lemma2_band( *detail::config_value( config, "n" ) );
    else if ( report.name == "cor21" )
      band = cor21_band( *detail::config_value( config, "n" ) );
    else if ( report.name == "thm3" )
    {
      band = thm3_band();
      metric = "heldout_accuracy";
    }
    const auto values = report.metric_values( config, metric );
    if ( !band || values.empty() )
      continue;
    double mean = 0.0;
    for ( auto v : values )
      mean += v;
    mean /= static_cast<double>( values.size() );
    out.push_back( { config, metric, mean, *band, band->contains( mean ) } );
  }
  return out;
}

} // namespace nfsm::experiments
