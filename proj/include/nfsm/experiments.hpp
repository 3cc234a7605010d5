#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include "automata.hpp"
#include "compiler.hpp"
#include "encodings.hpp"
#include "nn.hpp"
#include "unrolled.hpp"

namespace nfsm::experiments
{

// ---------------------------------------------------------------------------
// Datasets

struct Provenance
{
  std::string generator;
  std::uint64_t dfa_hash = 0;
  std::uint64_t seed = 0;
  std::size_t size = 0;

  friend bool operator==( const Provenance&, const Provenance& ) = default;
};

/// Columns of `inputs` and `labels` are samples; `strings` holds the unpadded symbol strings.
struct Dataset
{
  Eigen::MatrixXd inputs;
  Eigen::MatrixXd labels;
  std::vector<SymbolString> strings;
  Provenance provenance;

  std::size_t size() const { return strings.size(); }

  Dataset subset( const std::vector<std::size_t>& idx ) const
  {
    Dataset out{ Eigen::MatrixXd( inputs.rows(), static_cast<Eigen::Index>( idx.size() ) ),
                 Eigen::MatrixXd( labels.rows(), static_cast<Eigen::Index>( idx.size() ) ),
                 {},
                 provenance };
    for ( std::size_t c = 0; c < idx.size(); ++c )
    {
      out.inputs.col( static_cast<Eigen::Index>( c ) ) = inputs.col( static_cast<Eigen::Index>( idx[c] ) );
      out.labels.col( static_cast<Eigen::Index>( c ) ) = labels.col( static_cast<Eigen::Index>( idx[c] ) );
      out.strings.push_back( strings[idx[c]] );
    }
    out.provenance.size = idx.size();
    return out;
  }

  friend bool operator==( const Dataset& a, const Dataset& b )
  {
    const auto same = []( const Eigen::MatrixXd& x, const Eigen::MatrixXd& y ) {
      return x.rows() == y.rows() && x.cols() == y.cols() && x == y;
    };
    return a.provenance == b.provenance && a.strings == b.strings && same( a.inputs, b.inputs ) &&
           same( a.labels, b.labels );
  }
};

/// splitmix64 finalizer; derives independent stream seeds from one experiment seed.
inline std::uint64_t derive_seed( std::uint64_t seed, std::uint64_t stream )
{
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * ( stream + 1 );
  z = ( z ^ ( z >> 30 ) ) * 0xbf58476d1ce4e5b9ull;
  z = ( z ^ ( z >> 27 ) ) * 0x94d049bb133111ebull;
  return z ^ ( z >> 31 );
}

enum class LabelKind
{
  /// 1 x count acceptance indicator.
  acceptance,
  /// n x count one-hot final state.
  final_state
};

/// `count` strings drawn i.i.d. uniformly from Sigma^T, labeled by the automaton.
inline Dataset gen_dfa_dataset( const Dfa& dfa, std::size_t length, std::size_t count, std::uint64_t seed,
                                LabelKind labels = LabelKind::acceptance )
{
  if ( count == 0 )
    throw std::domain_error( "gen_dfa_dataset: count must be positive" );
  const auto k = dfa.alphabet_size(), n = dfa.state_count();
  std::mt19937_64 rng( seed );
  std::uniform_int_distribution<symbol_index> pick( 0, k - 1 );
  const auto cols = static_cast<Eigen::Index>( count );
  Dataset ds{ Eigen::MatrixXd::Zero( static_cast<Eigen::Index>( length * k ), cols ),
              Eigen::MatrixXd::Zero( labels == LabelKind::acceptance ? 1 : static_cast<Eigen::Index>( n ), cols ),
              {},
              { labels == LabelKind::acceptance ? "dfa_acceptance" : "dfa_final_state", dfa_hash( dfa ), seed, count } };
  ds.strings.reserve( count );
  for ( std::size_t c = 0; c < count; ++c )
  {
    SymbolString x( length );
    for ( auto& s : x )
      s = pick( rng );
    for ( std::size_t t = 0; t < length; ++t )
      ds.inputs( static_cast<Eigen::Index>( t * k + x[t] ), static_cast<Eigen::Index>( c ) ) = 1.0;
    const auto q = run( dfa, x );
    if ( labels == LabelKind::acceptance )
      ds.labels( 0, static_cast<Eigen::Index>( c ) ) = dfa.is_accepting( q ) ? 1.0 : 0.0;
    else
      ds.labels( static_cast<Eigen::Index>( q ), static_cast<Eigen::Index>( c ) ) = 1.0;
    ds.strings.push_back( std::move( x ) );
  }
  return ds;
}

/// Uniform random split; the first `round(train_fraction * size)` shuffled samples train.
inline std::pair<Dataset, Dataset> split_dataset( const Dataset& ds, double train_fraction, std::uint64_t seed )
{
  if ( !( train_fraction > 0.0 && train_fraction < 1.0 ) )
    throw std::domain_error( "split: train fraction must lie in (0, 1)" );
  std::vector<std::size_t> idx( ds.size() );
  std::iota( idx.begin(), idx.end(), std::size_t{ 0 } );
  std::mt19937_64 rng( seed );
  std::shuffle( idx.begin(), idx.end(), rng );
  const auto cut = static_cast<std::size_t>( std::llround( train_fraction * static_cast<double>( ds.size() ) ) );
  return { ds.subset( { idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>( cut ) } ),
           ds.subset( { idx.begin() + static_cast<std::ptrdiff_t>( cut ), idx.end() } ) };
}

/// How a^n b^m strings are padded to the fixed input length.
enum class PadMode
{
  /// Third one-hot symbol PAD (alphabet {a, b, PAD}).
  symbol,
  /// All-zero blocks over the alphabet {a, b}.
  zeros
};

inline constexpr symbol_index symbol_a = 0;
inline constexpr symbol_index symbol_b = 1;
inline constexpr symbol_index symbol_pad = 2;

inline SymbolString make_anbm( std::size_t n, std::size_t m )
{
  SymbolString x( n, symbol_a );
  x.insert( x.end(), m, symbol_b );
  return x;
}

inline bool is_anbn( const SymbolString& x )
{
  const auto n = static_cast<std::size_t>( std::count( x.begin(), x.end(), symbol_a ) );
  if ( n == 0 || x.size() != 2 * n )
    return false;
  return std::all_of( x.begin(), x.begin() + static_cast<std::ptrdiff_t>( n ), []( auto s ) { return s == symbol_a; } ) &&
         std::all_of( x.begin() + static_cast<std::ptrdiff_t>( n ), x.end(), []( auto s ) { return s == symbol_b; } );
}

/// Encodes a string of a/b symbols padded to `max_len` blocks.
inline Eigen::VectorXd encode_padded( const SymbolString& x, std::size_t max_len, PadMode pad )
{
  if ( x.size() > max_len )
    throw std::domain_error( "encode_padded: string longer than the padded length" );
  const std::size_t k = pad == PadMode::symbol ? 3 : 2;
  Eigen::VectorXd v = Eigen::VectorXd::Zero( static_cast<Eigen::Index>( max_len * k ) );
  for ( std::size_t t = 0; t < max_len; ++t )
  {
    if ( t < x.size() )
      v[static_cast<Eigen::Index>( t * k + x[t] )] = 1.0;
    else if ( pad == PadMode::symbol )
      v[static_cast<Eigen::Index>( t * k + symbol_pad )] = 1.0;
  }
  return v;
}

/*! \brief Balanced a^n b^m classification data.

  Half the samples are a^n b^n with n uniform in [lo, hi]; the other half are
  a^n b^m with n uniform in [lo, hi] and m uniform in [lo, hi] \ {n}.
  Samples alternate positive/negative so the classes are exactly balanced.
*/
inline Dataset gen_anbn_dataset( std::size_t lo, std::size_t hi, std::size_t max_len, std::size_t count,
                                 std::uint64_t seed, PadMode pad = PadMode::symbol )
{
  if ( lo == 0 || hi <= lo )
    throw std::domain_error( "gen_anbn_dataset: need 1 <= lo < hi" );
  if ( 2 * hi > max_len )
    throw std::domain_error( "gen_anbn_dataset: a^" + std::to_string( hi ) + "b^" + std::to_string( hi ) +
                             " does not fit in " + std::to_string( max_len ) + " symbols" );
  if ( count < 2 || count % 2 != 0 )
    throw std::domain_error( "gen_anbn_dataset: count must be a positive even number" );
  std::mt19937_64 rng( seed );
  std::uniform_int_distribution<std::size_t> pick( lo, hi );
  std::uniform_int_distribution<std::size_t> pick_other( lo, hi - 1 );
  const std::size_t k = pad == PadMode::symbol ? 3 : 2;
  Dataset ds{ Eigen::MatrixXd( static_cast<Eigen::Index>( max_len * k ), static_cast<Eigen::Index>( count ) ),
              Eigen::MatrixXd( 1, static_cast<Eigen::Index>( count ) ),
              {},
              { "anbn", 0, seed, count } };
  for ( std::size_t c = 0; c < count; ++c )
  {
    const auto n = pick( rng );
    SymbolString x;
    if ( c % 2 == 0 )
      x = make_anbm( n, n );
    else
    {
      auto m = pick_other( rng );
      if ( m >= n )
        ++m;
      x = make_anbm( n, m );
    }
    ds.inputs.col( static_cast<Eigen::Index>( c ) ) = encode_padded( x, max_len, pad );
    ds.labels( 0, static_cast<Eigen::Index>( c ) ) = c % 2 == 0 ? 1.0 : 0.0;
    ds.strings.push_back( std::move( x ) );
  }
  return ds;
}

// ---------------------------------------------------------------------------
// Statistics

struct Summary
{
  double mean = 0.0;
  /// Sample standard deviation (n - 1 denominator).
  double std = 0.0;
  /// Half-width of the Student-t 95% confidence interval.
  double ci95 = 0.0;
};

inline double student_t_975( std::size_t dof )
{
  boost::math::students_t dist( static_cast<double>( dof ) );
  return boost::math::quantile( dist, 0.975 );
}

inline Summary summarize( const std::vector<double>& values )
{
  if ( values.size() < 2 )
    throw std::domain_error( "summarize: need at least two values" );
  const auto n = static_cast<double>( values.size() );
  Summary s;
  s.mean = std::accumulate( values.begin(), values.end(), 0.0 ) / n;
  double ss = 0.0;
  for ( auto v : values )
    ss += ( v - s.mean ) * ( v - s.mean );
  s.std = std::sqrt( ss / ( n - 1.0 ) );
  s.ci95 = student_t_975( values.size() - 1 ) * s.std / std::sqrt( n );
  return s;
}

// ---------------------------------------------------------------------------
// Reports

struct SeedMetric
{
  std::string config;
  std::uint64_t seed = 0;
  std::string metric;
  double value = 0.0;
};

struct ExperimentReport
{
  std::string name;
  /// Configurations in presentation order, e.g. "T=4".
  std::vector<std::string> configs;
  std::vector<SeedMetric> values;
  double runtime_seconds = 0.0;
  std::vector<std::pair<std::string, std::string>> config_echo;

  std::vector<double> metric_values( const std::string& config, const std::string& metric ) const
  {
    std::vector<std::pair<std::uint64_t, double>> found;
    for ( const auto& v : values )
      if ( v.config == config && v.metric == metric )
        found.emplace_back( v.seed, v.value );
    std::sort( found.begin(), found.end() );
    std::vector<double> out;
    for ( auto& [_, value] : found )
      out.push_back( value );
    return out;
  }

  Summary summary( const std::string& config, const std::string& metric ) const
  {
    return summarize( metric_values( config, metric ) );
  }

  /// Metric names in first-seen order.
  std::vector<std::string> metrics() const
  {
    std::vector<std::string> out;
    for ( const auto& v : values )
      if ( std::find( out.begin(), out.end(), v.metric ) == out.end() )
        out.push_back( v.metric );
    return out;
  }
};

struct ProtocolOptions
{
  std::size_t sample_count = 2000;
  double train_fraction = 0.8;
  std::size_t width = 32;
  TrainConfig train;
  /// Worker threads for independent seed runs.
  std::size_t jobs = 1;
  /// Receives one line per finished run when set.
  std::function<void( const std::string& )> log;
};

namespace detail
{

/// Runs task(i) for i in [0, count) on up to `jobs` threads.
inline void parallel_for( std::size_t count, std::size_t jobs, const std::function<void( std::size_t )>& task )
{
  jobs = std::max<std::size_t>( 1, std::min( jobs, count ) );
  if ( jobs == 1 )
  {
    for ( std::size_t i = 0; i < count; ++i )
      task( i );
    return;
  }
  std::vector<std::thread> workers;
  for ( std::size_t w = 0; w < jobs; ++w )
    workers.emplace_back( [&, w] {
      for ( std::size_t i = w; i < count; i += jobs )
        task( i );
    } );
  for ( auto& t : workers )
    t.join();
}

class Recorder
{
public:
  explicit Recorder( ExperimentReport& report, const ProtocolOptions& options ) : report_( report ), options_( options ) {}

  void add( const std::string& config, std::uint64_t seed, const std::string& metric, double value )
  {
    std::lock_guard lock( mutex_ );
    report_.values.push_back( { config, seed, metric, value } );
  }

  void log( const std::string& line )
  {
    if ( !options_.log )
      return;
    std::lock_guard lock( mutex_ );
    options_.log( line );
  }

private:
  ExperimentReport& report_;
  const ProtocolOptions& options_;
  std::mutex mutex_;
};

/// Stable ordering: configs in presentation order, then seed, then metric insertion order.
inline void finish( ExperimentReport& report, std::chrono::steady_clock::time_point start )
{
  std::map<std::string, std::size_t> rank;
  for ( std::size_t i = 0; i < report.configs.size(); ++i )
    rank[report.configs[i]] = i;
  std::stable_sort( report.values.begin(), report.values.end(), [&]( const SeedMetric& a, const SeedMetric& b ) {
    return std::pair( rank.at( a.config ), a.seed ) < std::pair( rank.at( b.config ), b.seed );
  } );
  report.runtime_seconds = std::chrono::duration<double>( std::chrono::steady_clock::now() - start ).count();
}

inline double binary_accuracy( const Eigen::MatrixXd& out, const Eigen::MatrixXd& labels )
{
  std::size_t hit = 0;
  for ( Eigen::Index c = 0; c < out.cols(); ++c )
    hit += ( out( 0, c ) > 0.5 ) == ( labels( 0, c ) > 0.5 );
  return static_cast<double>( hit ) / static_cast<double>( out.cols() );
}

inline double argmax_accuracy( const Eigen::MatrixXd& out, const Eigen::MatrixXd& labels )
{
  std::size_t hit = 0;
  for ( Eigen::Index c = 0; c < out.cols(); ++c )
  {
    Eigen::Index got, want;
    out.col( c ).maxCoeff( &got );
    labels.col( c ).maxCoeff( &want );
    hit += got == want;
  }
  return static_cast<double>( hit ) / static_cast<double>( out.cols() );
}

inline std::vector<std::size_t> argmax_labels( const Eigen::MatrixXd& labels )
{
  std::vector<std::size_t> out;
  for ( Eigen::Index c = 0; c < labels.cols(); ++c )
  {
    Eigen::Index best;
    labels.col( c ).maxCoeff( &best );
    out.push_back( static_cast<std::size_t>( best ) );
  }
  return out;
}

inline TrainConfig with_loss( TrainConfig config, Loss loss )
{
  config.loss = loss;
  return config;
}

inline std::string cfg( const std::string& key, std::size_t value ) { return key + "=" + std::to_string( value ); }

} // namespace detail

/// Class centroid of every label present in `classes`, keyed by class id.
inline std::map<std::size_t, Eigen::VectorXd> class_centroids( const Eigen::MatrixXd& embeddings,
                                                               const std::vector<std::size_t>& classes )
{
  std::map<std::size_t, Eigen::VectorXd> sum;
  std::map<std::size_t, double> count;
  for ( std::size_t c = 0; c < classes.size(); ++c )
  {
    auto [it, fresh] = sum.try_emplace( classes[c], Eigen::VectorXd::Zero( embeddings.rows() ) );
    it->second += embeddings.col( static_cast<Eigen::Index>( c ) );
    count[classes[c]] += 1.0;
  }
  for ( auto& [cls, v] : sum )
    v /= count[cls];
  return sum;
}

/// Mean Euclidean distance over all pairs of class centroids (0 with fewer than two classes).
inline double mean_centroid_distance( const Eigen::MatrixXd& embeddings, const std::vector<std::size_t>& classes )
{
  const auto centroids = class_centroids( embeddings, classes );
  double total = 0.0;
  std::size_t pairs = 0;
  for ( auto a = centroids.begin(); a != centroids.end(); ++a )
    for ( auto b = std::next( a ); b != centroids.end(); ++b )
    {
      total += ( a->second - b->second ).norm();
      ++pairs;
    }
  return pairs == 0 ? 0.0 : total / static_cast<double>( pairs );
}

/// Same-class embeddings stay closer than different-class ones: max intra distance < min inter distance.
inline bool nerode_consistent( const Eigen::MatrixXd& embeddings, const std::vector<std::size_t>& classes )
{
  double max_intra = 0.0;
  double min_inter = std::numeric_limits<double>::infinity();
  for ( std::size_t a = 0; a < classes.size(); ++a )
    for ( std::size_t b = a + 1; b < classes.size(); ++b )
    {
      const double d =
          ( embeddings.col( static_cast<Eigen::Index>( a ) ) - embeddings.col( static_cast<Eigen::Index>( b ) ) ).norm();
      if ( classes[a] == classes[b] )
        max_intra = std::max( max_intra, d );
      else
        min_inter = std::min( min_inter, d );
    }
  return max_intra < min_inter;
}

// ---------------------------------------------------------------------------
// Protocols

/*! \brief Trained and constructive unrolled acceptors for the even-parity DFA.

  Metrics per (T, seed): `accuracy` (held-out), `train_accuracy`,
  `constructive_accuracy` (exhaustive check of the compiled acceptor).
*/
inline ExperimentReport run_theorem1( const std::vector<std::size_t>& lengths, const std::vector<std::uint64_t>& seeds,
                                      const ProtocolOptions& options = {} )
{
  const auto start = std::chrono::steady_clock::now();
  const auto dfa = make_parity_dfa();
  ExperimentReport report{ "thm1", {}, {}, 0.0, { { "dfa", "even parity" }, { "samples", std::to_string( options.sample_count ) } } };
  for ( auto t : lengths )
    report.configs.push_back( detail::cfg( "T", t ) );
  detail::Recorder rec( report, options );

  std::vector<double> constructive( lengths.size() );
  for ( std::size_t i = 0; i < lengths.size(); ++i )
  {
    const auto r = verify_exact( build_unrolled_acceptor( dfa, lengths[i] ), dfa, lengths[i] );
    constructive[i] = 1.0 - static_cast<double>( r.mismatch_count ) / static_cast<double>( r.total_strings );
  }

  detail::parallel_for( lengths.size() * seeds.size(), options.jobs, [&]( std::size_t task ) {
    const auto i = task / seeds.size();
    const auto length = lengths[i];
    const auto seed = seeds[task % seeds.size()];
    const auto config = report.configs[i];
    const auto data = gen_dfa_dataset( dfa, length, options.sample_count, derive_seed( seed, 1 ) );
    const auto [tr, te] = split_dataset( data, options.train_fraction, derive_seed( seed, 2 ) );
    UnrolledConfig uc{ length, 2, dfa.state_count(), options.width, dfa.start_state(), { 1 }, { Activation::sigmoid } };
    auto result = train( init_unrolled( uc, derive_seed( seed, 3 ) ), tr.inputs, tr.labels,
                         detail::with_loss( options.train, Loss::bce ) );
    const double acc = detail::binary_accuracy( result.model.forward_batch( te.inputs ), te.labels );
    const double train_acc = detail::binary_accuracy( result.model.forward_batch( tr.inputs ), tr.labels );
    rec.add( config, seed, "accuracy", acc );
    rec.add( config, seed, "train_accuracy", train_acc );
    rec.add( config, seed, "constructive_accuracy", constructive[i] );
    rec.log( "thm1 " + config + " seed=" + std::to_string( seed ) + " accuracy=" + std::to_string( acc ) );
  } );
  detail::finish( report, start );
  return report;
}

/// Random DFA used for grid cell (n, k) and a given seed.
inline Dfa lemma1_dfa( std::size_t n, std::size_t k, std::uint64_t seed )
{
  return make_random_dfa( n, k, derive_seed( seed, 100 + 10 * n + k ) );
}

/// All n*k transition pairs as ([e_i; u_j], e_{delta(i,j)}) columns.
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> one_hot_transition_data( const Dfa& dfa )
{
  const auto n = dfa.state_count(), k = dfa.alphabet_size();
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero( static_cast<Eigen::Index>( n + k ), static_cast<Eigen::Index>( n * k ) );
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero( static_cast<Eigen::Index>( n ), static_cast<Eigen::Index>( n * k ) );
  for ( state_index i = 0; i < n; ++i )
    for ( symbol_index j = 0; j < k; ++j )
    {
      const auto c = static_cast<Eigen::Index>( i * k + j );
      x( static_cast<Eigen::Index>( i ), c ) = 1.0;
      x( static_cast<Eigen::Index>( n + j ), c ) = 1.0;
      y( static_cast<Eigen::Index>( dfa.transition( i, j ) ), c ) = 1.0;
    }
  return { std::move( x ), std::move( y ) };
}

/// All n*k transition pairs as ([b_i; u_j], b_{delta(i,j)}) columns.
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> binary_transition_data( const Dfa& dfa )
{
  const auto n = dfa.state_count(), k = dfa.alphabet_size();
  const auto d = binary_width( n );
  Eigen::MatrixXd x( static_cast<Eigen::Index>( d + k ), static_cast<Eigen::Index>( n * k ) );
  Eigen::MatrixXd y( static_cast<Eigen::Index>( d ), static_cast<Eigen::Index>( n * k ) );
  for ( state_index i = 0; i < n; ++i )
    for ( symbol_index j = 0; j < k; ++j )
    {
      const auto c = static_cast<Eigen::Index>( i * k + j );
      x.col( c ) << binary_code( i, d ), one_hot( j, k );
      y.col( c ) = binary_code( dfa.transition( i, j ), d );
    }
  return { std::move( x ), std::move( y ) };
}

/*! \brief Two-layer ReLU MLP trained on every one-hot transition pair.

  Metrics per (n, k, seed): `accuracy` (argmax next state after training),
  `init_accuracy` (same, before training), `constructive_accuracy`.
*/
inline ExperimentReport run_lemma1( const std::vector<std::size_t>& state_counts,
                                    const std::vector<std::size_t>& alphabet_sizes,
                                    const std::vector<std::uint64_t>& seeds, const ProtocolOptions& options = {} )
{
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report{ "lemma1", {}, {}, 0.0, { { "dfa", "random total DFA per cell and seed" } } };
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for ( auto n : state_counts )
    for ( auto k : alphabet_sizes )
    {
      cells.emplace_back( n, k );
      report.configs.push_back( detail::cfg( "n", n ) + "," + detail::cfg( "k", k ) );
    }
  detail::Recorder rec( report, options );
  detail::parallel_for( cells.size() * seeds.size(), options.jobs, [&]( std::size_t task ) {
    const auto cell = task / seeds.size();
    const auto [n, k] = cells[cell];
    const auto seed = seeds[task % seeds.size()];
    const auto dfa = lemma1_dfa( n, k, seed );
    const auto [x, y] = one_hot_transition_data( dfa );
    auto mlp = init_mlp( { n + k, options.width, n }, { Activation::relu, Activation::identity }, derive_seed( seed, 3 ) );
    const double init_acc = detail::argmax_accuracy( mlp.forward_batch( x ), y );
    auto result = train( std::move( mlp ), x, y, detail::with_loss( options.train, Loss::softmax_ce ) );
    const double acc = detail::argmax_accuracy( result.model.forward_batch( x ), y );
    const auto check = verify_transition_layer( build_transition_layer( dfa ), dfa );
    const auto& config = report.configs[cell];
    rec.add( config, seed, "accuracy", acc );
    rec.add( config, seed, "init_accuracy", init_acc );
    rec.add( config, seed, "constructive_accuracy",
             1.0 - static_cast<double>( check.wrong_pairs ) / static_cast<double>( check.total_pairs ) );
    rec.log( "lemma1 " + config + " seed=" + std::to_string( seed ) + " accuracy=" + std::to_string( acc ) );
  } );
  detail::finish( report, start );
  return report;
}

/*! \brief Sigmoid MLP on binary-coded transitions of mod-n counters (k = 2).

  Metrics per (n, seed): `accuracy` (fraction of exactly reproduced next
  codes under rounding), `constructive_accuracy` (threshold circuit).
*/
inline ExperimentReport run_lemma2( const std::vector<std::size_t>& state_counts, const std::vector<std::uint64_t>& seeds,
                                    const ProtocolOptions& options = {} )
{
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report{ "lemma2", {}, {}, 0.0, { { "dfa", "mod-n counter" }, { "k", "2" } } };
  for ( auto n : state_counts )
    report.configs.push_back( detail::cfg( "n", n ) );
  detail::Recorder rec( report, options );
  detail::parallel_for( state_counts.size() * seeds.size(), options.jobs, [&]( std::size_t task ) {
    const auto i = task / seeds.size();
    const auto n = state_counts[i];
    const auto seed = seeds[task % seeds.size()];
    const auto dfa = make_mod_counter_dfa( n );
    const auto d = binary_width( n );
    const auto [x, y] = binary_transition_data( dfa );
    auto mlp = init_mlp( { d + 2, options.width, d }, { Activation::sigmoid, Activation::sigmoid }, derive_seed( seed, 3 ) );
    auto result = train( std::move( mlp ), x, y, detail::with_loss( options.train, Loss::bce ) );
    std::size_t exact = 0;
    for ( Eigen::Index c = 0; c < x.cols(); ++c )
      exact += binarized_forward( result.model, Eigen::VectorXd( x.col( c ) ) ) == y.col( c );
    const double acc = static_cast<double>( exact ) / static_cast<double>( x.cols() );
    const auto check = verify_binary_network( build_binary_threshold_network( dfa ), dfa );
    const auto& config = report.configs[i];
    rec.add( config, seed, "accuracy", acc );
    rec.add( config, seed, "constructive_accuracy",
             1.0 - static_cast<double>( check.wrong_pairs ) / static_cast<double>( check.total_pairs ) );
    rec.log( "lemma2 " + config + " seed=" + std::to_string( seed ) + " accuracy=" + std::to_string( acc ) );
  } );
  detail::finish( report, start );
  return report;
}

/*! \brief Unrolled embedding network with a linear state classifier on top (even parity).

  The network is trained end to end with softmax cross-entropy on the final
  DFA state. Metrics per (T, seed): `accuracy` (held-out), `nerode_consistent`
  (1 if same-state test embeddings are closer than different-state ones),
  `constructive_accuracy` (identity embedding head, argmax vs. delta^).
*/
inline ExperimentReport run_theorem2( const std::vector<std::size_t>& lengths, const std::vector<std::uint64_t>& seeds,
                                      const ProtocolOptions& options = {} )
{
  const auto start = std::chrono::steady_clock::now();
  const auto dfa = make_parity_dfa();
  const auto n = dfa.state_count();
  ExperimentReport report{ "thm2", {}, {}, 0.0, { { "dfa", "even parity" }, { "embedding_dim", std::to_string( n ) } } };
  for ( auto t : lengths )
    report.configs.push_back( detail::cfg( "T", t ) );
  detail::Recorder rec( report, options );

  std::vector<double> constructive( lengths.size() );
  for ( std::size_t i = 0; i < lengths.size(); ++i )
  {
    const auto net = build_embedding_head( dfa, lengths[i] );
    std::size_t hit = 0, total = 0;
    for_each_string( dfa.alphabet_size(), lengths[i], [&]( const SymbolString& x ) {
      Eigen::Index best;
      forward( net, encode_string( x, dfa.alphabet_size() ).data ).maxCoeff( &best );
      hit += static_cast<std::size_t>( best ) == run( dfa, x );
      ++total;
    } );
    constructive[i] = static_cast<double>( hit ) / static_cast<double>( total );
  }

  detail::parallel_for( lengths.size() * seeds.size(), options.jobs, [&]( std::size_t task ) {
    const auto i = task / seeds.size();
    const auto length = lengths[i];
    const auto seed = seeds[task % seeds.size()];
    const auto& config = report.configs[i];
    const auto data = gen_dfa_dataset( dfa, length, options.sample_count, derive_seed( seed, 1 ), LabelKind::final_state );
    const auto [tr, te] = split_dataset( data, options.train_fraction, derive_seed( seed, 2 ) );
    UnrolledConfig uc{ length, 2, n, options.width, dfa.start_state(), { n, n },
                       { Activation::identity, Activation::identity } };
    auto result = train( init_unrolled( uc, derive_seed( seed, 3 ) ), tr.inputs, tr.labels,
                         detail::with_loss( options.train, Loss::softmax_ce ) );
    const double acc = detail::argmax_accuracy( result.model.forward_batch( te.inputs ), te.labels );
    const bool consistent =
        nerode_consistent( result.model.head_output( te.inputs, 0 ), detail::argmax_labels( te.labels ) );
    rec.add( config, seed, "accuracy", acc );
    rec.add( config, seed, "nerode_consistent", consistent ? 1.0 : 0.0 );
    rec.add( config, seed, "constructive_accuracy", constructive[i] );
    rec.log( "thm2 " + config + " seed=" + std::to_string( seed ) + " accuracy=" + std::to_string( acc ) );
  } );
  detail::finish( report, start );
  return report;
}

/*! \brief Compressed state embeddings for mod-n counters at T = 10.

  The unrolled carrier feeds a linear compression to d = ceil(log2 n)
  dimensions (at least 1) and a linear classifier over the n states.
  Metrics per (n, seed): `accuracy`, `centroid_distance` (mean pairwise
  Euclidean distance between compressed class centroids on held-out data),
  `projection_margin` (minimum pairwise distance of the seeded random
  projection built by the constructive pass).
*/
inline ExperimentReport run_corollary21( const std::vector<std::size_t>& state_counts,
                                         const std::vector<std::uint64_t>& seeds, const ProtocolOptions& options = {},
                                         std::size_t length = 10 )
{
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report{ "cor21", {}, {}, 0.0, { { "dfa", "mod-n counter" }, { "T", std::to_string( length ) } } };
  for ( auto n : state_counts )
    report.configs.push_back( detail::cfg( "n", n ) + ",d=" + std::to_string( binary_width( n ) ) );
  detail::Recorder rec( report, options );
  detail::parallel_for( state_counts.size() * seeds.size(), options.jobs, [&]( std::size_t task ) {
    const auto i = task / seeds.size();
    const auto n = state_counts[i];
    const auto d = binary_width( n );
    const auto seed = seeds[task % seeds.size()];
    const auto& config = report.configs[i];
    const auto dfa = make_mod_counter_dfa( n );
    const auto data = gen_dfa_dataset( dfa, length, options.sample_count, derive_seed( seed, 1 ), LabelKind::final_state );
    const auto [tr, te] = split_dataset( data, options.train_fraction, derive_seed( seed, 2 ) );
    UnrolledConfig uc{ length, 2, n, options.width, dfa.start_state(), { d, n },
                       { Activation::identity, Activation::identity } };
    auto result = train( init_unrolled( uc, derive_seed( seed, 3 ) ), tr.inputs, tr.labels,
                         detail::with_loss( options.train, Loss::softmax_ce ) );
    const double acc = detail::argmax_accuracy( result.model.forward_batch( te.inputs ), te.labels );
    const double dist =
        mean_centroid_distance( result.model.head_output( te.inputs, 0 ), detail::argmax_labels( te.labels ) );
    rec.add( config, seed, "accuracy", acc );
    rec.add( config, seed, "centroid_distance", dist );
    if ( n >= 2 )
      rec.add( config, seed, "projection_margin", build_compressed_embedding( dfa, 0.1, seed ).min_distance );
    rec.log( "cor21 " + config + " seed=" + std::to_string( seed ) + " accuracy=" + std::to_string( acc ) +
             " centroid_distance=" + std::to_string( dist ) );
  } );
  detail::finish( report, start );
  return report;
}

struct AnbnOptions
{
  std::size_t train_lo = 1, train_hi = 5;
  std::size_t test_lo = 6, test_hi = 10;
  std::size_t max_len = 20;
  std::size_t train_count = 2000;
  std::size_t test_count = 1000;
  PadMode pad = PadMode::symbol;
  std::vector<std::size_t> hidden = { 32, 32 };
};

/*! \brief Fixed-size ReLU MLP on padded a^n b^m strings, tested on unseen n.

  Metrics per seed: `heldout_accuracy` (n in [test_lo, test_hi]) and
  `train_accuracy` (n in [train_lo, train_hi]).
*/
inline ExperimentReport run_theorem3( const std::vector<std::uint64_t>& seeds, const ProtocolOptions& options = {},
                                      const AnbnOptions& anbn = {} )
{
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report{ "thm3",
                           { "train_n=[" + std::to_string( anbn.train_lo ) + "," + std::to_string( anbn.train_hi ) +
                             "],test_n=[" + std::to_string( anbn.test_lo ) + "," + std::to_string( anbn.test_hi ) + "]" },
                           {},
                           0.0,
                           { { "language", "a^n b^n" },
                             { "max_len", std::to_string( anbn.max_len ) },
                             { "pad", anbn.pad == PadMode::symbol ? "symbol" : "zeros" } } };
  detail::Recorder rec( report, options );
  const auto& config = report.configs.front();
  detail::parallel_for( seeds.size(), options.jobs, [&]( std::size_t task ) {
    const auto seed = seeds[task];
    const auto tr = gen_anbn_dataset( anbn.train_lo, anbn.train_hi, anbn.max_len, anbn.train_count,
                                      derive_seed( seed, 1 ), anbn.pad );
    const auto te = gen_anbn_dataset( anbn.test_lo, anbn.test_hi, anbn.max_len, anbn.test_count, derive_seed( seed, 2 ),
                                      anbn.pad );
    std::vector<std::size_t> dims{ static_cast<std::size_t>( tr.inputs.rows() ) };
    std::vector<Activation> acts;
    for ( auto h : anbn.hidden )
    {
      dims.push_back( h );
      acts.push_back( Activation::relu );
    }
    dims.push_back( 1 );
    acts.push_back( Activation::sigmoid );
    auto result = train( init_mlp( dims, acts, derive_seed( seed, 3 ) ), tr.inputs, tr.labels,
                         detail::with_loss( options.train, Loss::bce ) );
    const double held = detail::binary_accuracy( result.model.forward_batch( te.inputs ), te.labels );
    const double fit = detail::binary_accuracy( result.model.forward_batch( tr.inputs ), tr.labels );
    rec.add( config, seed, "heldout_accuracy", held );
    rec.add( config, seed, "train_accuracy", fit );
    rec.log( "thm3 seed=" + std::to_string( seed ) + " heldout=" + std::to_string( held ) +
             " train=" + std::to_string( fit ) );
  } );
  detail::finish( report, start );
  return report;
}

/// Constructive exactness sweep: parity and mod-n counters, every T in [0, max_length].
struct ExactnessSweep
{
  std::size_t configurations = 0;
  std::uint64_t strings_checked = 0;
  std::uint64_t mismatches = 0;
  std::vector<std::string> failures;
  bool exact() const { return mismatches == 0 && failures.empty(); }
};

inline ExactnessSweep constructive_exactness_sweep( const std::vector<std::size_t>& counter_sizes,
                                                    std::size_t max_length, std::size_t jobs = 1 )
{
  std::vector<std::pair<std::string, Dfa>> dfas{ { "parity", make_parity_dfa() } };
  for ( auto n : counter_sizes )
    dfas.emplace_back( "mod" + std::to_string( n ), make_mod_counter_dfa( n ) );
  ExactnessSweep sweep;
  for ( const auto& [name, dfa] : dfas )
    for ( std::size_t t = 0; t <= max_length; ++t )
    {
      const auto r = verify_exact( build_unrolled_acceptor( dfa, t ), dfa, t, { std::uint64_t{ 1 } << 24, jobs, 4 } );
      ++sweep.configurations;
      sweep.strings_checked += r.total_strings;
      sweep.mismatches += r.mismatch_count;
      if ( !r.exact )
        sweep.failures.push_back( name + " T=" + std::to_string( t ) );
    }
  return sweep;
}

} // namespace nfsm::experiments
