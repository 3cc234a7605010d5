#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "automata.hpp"
#include "encodings.hpp"
#include "network.hpp"
#include "nn.hpp"

namespace nfsm
{

namespace construction
{
inline constexpr const char* transition_layer = "transition_layer";
inline constexpr const char* unrolled_acceptor = "unrolled_acceptor";
inline constexpr const char* binary_threshold = "binary_threshold";
inline constexpr const char* embedding_head = "embedding_head";
inline constexpr const char* compressed_embedding = "compressed_embedding";
} // namespace construction

/// Raised when a randomized construction runs out of attempts.
class construction_failure : public std::runtime_error
{
public:
  construction_failure( const std::string& what, double best ) : std::runtime_error( what ), best_distance( best ) {}
  double best_distance;
};

/// Raised when exhaustive enumeration would exceed the configured string budget.
class enumeration_budget_error : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

namespace detail
{

inline std::size_t pair_unit( std::size_t i, std::size_t j, std::size_t k ) { return i * k + j; }

/* The n*k x n matrix that sums pair units into the one-hot next state:
   column (i, j) of the lookup output layer is e_{delta(i, j)}. */
inline Eigen::MatrixXd pair_to_state( const Dfa& dfa )
{
  const auto n = dfa.state_count(), k = dfa.alphabet_size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero( static_cast<Eigen::Index>( n ), static_cast<Eigen::Index>( n * k ) );
  for ( state_index i = 0; i < n; ++i )
    for ( symbol_index j = 0; j < k; ++j )
      m( static_cast<Eigen::Index>( dfa.transition( i, j ) ), static_cast<Eigen::Index>( pair_unit( i, j, k ) ) ) = 1.0;
  return m;
}

/* One unrolled transition layer. Its input is [carried; symbols of steps t..T-1]
   where `carried` is either nothing (first step, state given by bias) or the
   n*k pair units of the previous step. Output is [pair units of step t;
   symbols of steps t+1..T-1], all passed through ReLU (the passthrough
   values are 0/1 so ReLU leaves them unchanged). */
inline LayerSpec unrolled_step( const Dfa& dfa, std::size_t remaining_after, bool first )
{
  const auto n = dfa.state_count(), k = dfa.alphabet_size();
  const auto nk = static_cast<Eigen::Index>( n * k );
  const auto kk = static_cast<Eigen::Index>( k );
  const auto carried = first ? Eigen::Index{ 0 } : nk;
  const auto pass = static_cast<Eigen::Index>( remaining_after * k );
  const auto in_dim = carried + kk + pass;
  const auto out_dim = nk + pass;

  LayerSpec layer{ Eigen::MatrixXd::Zero( out_dim, in_dim ), Eigen::VectorXd::Zero( out_dim ), Activation::relu, {} };
  const Eigen::MatrixXd to_state = pair_to_state( dfa );
  for ( state_index i = 0; i < n; ++i )
  {
    for ( symbol_index j = 0; j < k; ++j )
    {
      const auto u = static_cast<Eigen::Index>( pair_unit( i, j, k ) );
      layer.weights( u, carried + static_cast<Eigen::Index>( j ) ) = 1.0;
      if ( first )
        layer.bias[u] = ( i == dfa.start_state() ? 1.0 : 0.0 ) - 1.0;
      else
      {
        layer.weights.block( u, 0, 1, nk ) = to_state.row( static_cast<Eigen::Index>( i ) );
        layer.bias[u] = -1.0;
      }
    }
  }
  for ( Eigen::Index p = 0; p < pass; ++p )
    layer.weights( nk + p, carried + kk + p ) = 1.0;
  return layer;
}

/// Layers 1..T of the unrolled acceptor; the last one outputs the n*k pair units of step T.
inline std::vector<LayerSpec> unrolled_carrier( const Dfa& dfa, std::size_t length )
{
  std::vector<LayerSpec> layers;
  for ( std::size_t t = 0; t < length; ++t )
    layers.push_back( unrolled_step( dfa, length - t - 1, t == 0 ) );
  return layers;
}

} // namespace detail

/*! \brief One-hidden-layer ReLU lookup computing the transition function.

  Input [e_i; u_j] (dimension n + k), hidden width n * k, output e_{delta(i, j)}.
  Hidden unit (i, j) has weight +1 on state coordinate i and symbol
  coordinate j with bias -1, so it outputs 1 exactly on its own pair.
*/
inline NetworkSpec build_transition_layer( const Dfa& dfa )
{
  const auto n = dfa.state_count(), k = dfa.alphabet_size();
  const auto nk = static_cast<Eigen::Index>( n * k );
  LayerSpec hidden{ Eigen::MatrixXd::Zero( nk, static_cast<Eigen::Index>( n + k ) ), Eigen::VectorXd::Constant( nk, -1.0 ),
                    Activation::relu, {} };
  for ( state_index i = 0; i < n; ++i )
    for ( symbol_index j = 0; j < k; ++j )
    {
      const auto u = static_cast<Eigen::Index>( detail::pair_unit( i, j, k ) );
      hidden.weights( u, static_cast<Eigen::Index>( i ) ) = 1.0;
      hidden.weights( u, static_cast<Eigen::Index>( n + j ) ) = 1.0;
    }
  LayerSpec output{ detail::pair_to_state( dfa ), Eigen::VectorXd::Zero( static_cast<Eigen::Index>( n ) ),
                    Activation::identity, {} };
  NetworkSpec net{ { std::move( hidden ), std::move( output ) }, n + k, n,
                   { construction::transition_layer, dfa_hash( dfa ), std::nullopt, std::nullopt } };
  net.validate();
  return net;
}

/*! \brief Depth T+1 network computing the language indicator on Sigma^T.

  Input is the concatenated one-hot string (dimension T * k). Layer t
  evaluates the transition lookup for step t and routes the unread symbol
  blocks forward; the start state enters through the first layer's bias.
  The readout sums the pair units whose target state accepts and applies
  the step 1[z > 0.5]. With T = 0 the network is the readout alone and
  outputs 1 iff the start state accepts.
*/
inline NetworkSpec build_unrolled_acceptor( const Dfa& dfa, std::size_t length )
{
  const auto n = dfa.state_count(), k = dfa.alphabet_size();
  NetworkSpec net;
  net.input_dim = length * k;
  net.output_dim = 1;
  net.metadata = { construction::unrolled_acceptor, dfa_hash( dfa ), length, std::nullopt };
  net.layers = detail::unrolled_carrier( dfa, length );

  LayerSpec readout;
  readout.activation = Activation::step_strict;
  readout.thresholds = Eigen::VectorXd::Constant( 1, 0.5 );
  if ( length == 0 )
  {
    readout.weights = Eigen::MatrixXd::Zero( 1, 0 );
    readout.bias = Eigen::VectorXd::Constant( 1, dfa.is_accepting( dfa.start_state() ) ? 1.0 : 0.0 );
  }
  else
  {
    Eigen::VectorXd accept_indicator( static_cast<Eigen::Index>( n ) );
    for ( state_index q = 0; q < n; ++q )
      accept_indicator[static_cast<Eigen::Index>( q )] = dfa.is_accepting( q ) ? 1.0 : 0.0;
    readout.weights = accept_indicator.transpose() * detail::pair_to_state( dfa );
    readout.bias = Eigen::VectorXd::Zero( 1 );
  }
  net.layers.push_back( std::move( readout ) );
  net.validate();
  return net;
}

/*! \brief Two-layer threshold circuit on binary state codes.

  Input [b_i; u_j] (dimension d + k). Every transition pair has one
  exact-match hidden unit (weight +1 where its pattern is 1, -1 where it is
  0, threshold = number of ones); output bit l ORs the hidden units whose
  target code has bit l set. All units use 1[z >= theta].
*/
inline NetworkSpec build_binary_threshold_network( const Dfa& dfa )
{
  const auto n = dfa.state_count(), k = dfa.alphabet_size();
  const auto d = binary_width( n );
  const auto nk = static_cast<Eigen::Index>( n * k );
  const auto in_dim = static_cast<Eigen::Index>( d + k );

  LayerSpec hidden{ Eigen::MatrixXd::Zero( nk, in_dim ), Eigen::VectorXd::Zero( nk ), Activation::step,
                    Eigen::VectorXd::Zero( nk ) };
  LayerSpec output{ Eigen::MatrixXd::Zero( static_cast<Eigen::Index>( d ), nk ),
                    Eigen::VectorXd::Zero( static_cast<Eigen::Index>( d ) ), Activation::step,
                    Eigen::VectorXd::Ones( static_cast<Eigen::Index>( d ) ) };
  for ( state_index i = 0; i < n; ++i )
  {
    const Eigen::VectorXd code = binary_code( i, d );
    for ( symbol_index j = 0; j < k; ++j )
    {
      const auto u = static_cast<Eigen::Index>( detail::pair_unit( i, j, k ) );
      Eigen::VectorXd pattern( in_dim );
      pattern << code, one_hot( j, k );
      hidden.weights.row( u ) = ( 2.0 * pattern.array() - 1.0 ).matrix().transpose();
      hidden.thresholds[u] = pattern.sum();
      const Eigen::VectorXd target = binary_code( dfa.transition( i, j ), d );
      for ( Eigen::Index bit = 0; bit < target.size(); ++bit )
        if ( target[bit] == 1.0 )
          output.weights( bit, u ) = 1.0;
    }
  }
  NetworkSpec net{ { std::move( hidden ), std::move( output ) }, d + k, d,
                   { construction::binary_threshold, dfa_hash( dfa ), std::nullopt, std::nullopt } };
  net.validate();
  return net;
}

inline void check_distinct_columns( const Eigen::MatrixXd& v )
{
  for ( Eigen::Index a = 0; a < v.cols(); ++a )
    for ( Eigen::Index b = a + 1; b < v.cols(); ++b )
      if ( v.col( a ) == v.col( b ) )
        throw std::domain_error( "embedding matrix columns " + std::to_string( a ) + " and " + std::to_string( b ) +
                                 " coincide" );
}

/*! \brief Unrolled state carrier followed by the linear map V (d x n).

  The output for a string x of length T is V e_{delta^(x)}, so two strings
  share an embedding exactly when they reach the same state.
*/
inline NetworkSpec build_embedding_head( const Dfa& dfa, std::size_t length, const Eigen::MatrixXd& v )
{
  const auto n = dfa.state_count(), k = dfa.alphabet_size();
  if ( static_cast<std::size_t>( v.cols() ) != n )
    throw std::domain_error( "embedding matrix needs one column per state (" + std::to_string( n ) + "), got " +
                             std::to_string( v.cols() ) );
  if ( v.rows() == 0 )
    throw std::domain_error( "embedding matrix has no rows" );
  check_distinct_columns( v );

  NetworkSpec net;
  net.input_dim = length * k;
  net.output_dim = static_cast<std::size_t>( v.rows() );
  net.metadata = { construction::embedding_head, dfa_hash( dfa ), length, std::nullopt };
  net.layers = detail::unrolled_carrier( dfa, length );
  LayerSpec head;
  head.activation = Activation::identity;
  if ( length == 0 )
  {
    head.weights = Eigen::MatrixXd::Zero( v.rows(), 0 );
    head.bias = v.col( static_cast<Eigen::Index>( dfa.start_state() ) );
  }
  else
  {
    head.weights = v * detail::pair_to_state( dfa );
    head.bias = Eigen::VectorXd::Zero( v.rows() );
  }
  net.layers.push_back( std::move( head ) );
  net.validate();
  return net;
}

/// Identity embedding: the output is the one-hot final state.
inline NetworkSpec build_embedding_head( const Dfa& dfa, std::size_t length )
{
  const auto n = static_cast<Eigen::Index>( dfa.state_count() );
  return build_embedding_head( dfa, length, Eigen::MatrixXd::Identity( n, n ) );
}

struct CompressedEmbedding
{
  /// d x n projection; column i is the compressed code of state i.
  Eigen::MatrixXd projection;
  double min_distance = 0.0;
  std::size_t attempts = 0;
};

/// Minimum Euclidean distance between distinct columns.
inline double min_column_distance( const Eigen::MatrixXd& p )
{
  double best = std::numeric_limits<double>::infinity();
  for ( Eigen::Index a = 0; a < p.cols(); ++a )
    for ( Eigen::Index b = a + 1; b < p.cols(); ++b )
      best = std::min( best, ( p.col( a ) - p.col( b ) ).norm() );
  return best;
}

/// Dimension of the random projection: ceil(log2 n) + 1.
inline std::size_t compressed_dim( std::size_t state_count )
{
  std::size_t bits = 0;
  while ( ( std::size_t{ 1 } << bits ) < state_count )
    ++bits;
  return bits + 1;
}

/*! \brief Seeded Gaussian random projection of the one-hot states.

  Entries are N(0, 1) / sqrt(d). Draws are rejected until every pair of
  projected states is more than `epsilon` apart.
*/
inline CompressedEmbedding build_compressed_embedding( const Dfa& dfa, double epsilon, std::uint64_t seed,
                                                       std::size_t max_attempts = 100 )
{
  const auto n = dfa.state_count();
  if ( n < 2 )
    throw std::domain_error( "compressed embedding needs at least two states" );
  if ( !( epsilon > 0.0 ) )
    throw std::domain_error( "compressed embedding needs epsilon > 0" );
  const auto d = compressed_dim( n );
  std::mt19937_64 rng( seed );
  std::normal_distribution<double> gauss( 0.0, 1.0 );
  const double scale = 1.0 / std::sqrt( static_cast<double>( d ) );
  double best = 0.0;
  for ( std::size_t attempt = 1; attempt <= max_attempts; ++attempt )
  {
    Eigen::MatrixXd p( static_cast<Eigen::Index>( d ), static_cast<Eigen::Index>( n ) );
    for ( Eigen::Index c = 0; c < p.cols(); ++c )
      for ( Eigen::Index r = 0; r < p.rows(); ++r )
        p( r, c ) = gauss( rng ) * scale;
    const double dist = min_column_distance( p );
    if ( dist > epsilon )
      return { std::move( p ), dist, attempt };
    best = std::max( best, dist );
  }
  throw construction_failure( "no projection separated all states by more than " + std::to_string( epsilon ) + " in " +
                                  std::to_string( max_attempts ) + " attempts (best " + std::to_string( best ) + ")",
                              best );
}

/// Embedding network whose head is the given projection.
inline NetworkSpec build_compressed_network( const Dfa& dfa, std::size_t length, const CompressedEmbedding& embedding,
                                             std::uint64_t seed )
{
  auto net = build_embedding_head( dfa, length, embedding.projection );
  net.metadata.construction = construction::compressed_embedding;
  net.metadata.seed = seed;
  return net;
}

// ---------------------------------------------------------------------------
// Verification

struct Mismatch
{
  SymbolString input;
  bool dfa_verdict;
  bool network_verdict;

  friend bool operator==( const Mismatch&, const Mismatch& ) = default;
};

struct VerificationReport
{
  std::uint64_t total_strings = 0;
  std::uint64_t mismatch_count = 0;
  /// Lexicographically sorted witnesses, truncated to VerifyOptions::max_witnesses.
  std::vector<Mismatch> mismatches;
  bool exact = true;
};

struct VerifyOptions
{
  std::uint64_t budget = std::uint64_t{ 1 } << 24;
  std::size_t jobs = 1;
  std::size_t max_witnesses = 64;
};

namespace detail
{

inline void check_acceptor_dims( const NetworkSpec& net, const Dfa& dfa, std::size_t length )
{
  if ( net.input_dim != length * dfa.alphabet_size() )
    throw std::domain_error( "network input dim " + std::to_string( net.input_dim ) + " does not match T*k = " +
                             std::to_string( length * dfa.alphabet_size() ) );
  if ( net.output_dim != 1 )
    throw std::domain_error( "network output dim " + std::to_string( net.output_dim ) + " is not a scalar verdict" );
}

/// Checks strings with lexicographic indices [begin, end) in batches.
inline VerificationReport verify_range( const NetworkSpec& net, const Dfa& dfa, std::size_t length, std::uint64_t begin,
                                        std::uint64_t end, std::size_t max_witnesses )
{
  constexpr std::uint64_t batch = 2048;
  const auto k = dfa.alphabet_size();
  VerificationReport report;
  std::vector<SymbolString> strings;
  for ( std::uint64_t lo = begin; lo < end; lo += batch )
  {
    const auto hi = std::min( end, lo + batch );
    Eigen::MatrixXd inputs = Eigen::MatrixXd::Zero( static_cast<Eigen::Index>( length * k ),
                                                    static_cast<Eigen::Index>( hi - lo ) );
    strings.clear();
    for ( auto idx = lo; idx < hi; ++idx )
    {
      strings.push_back( string_at( k, length, idx ) );
      const auto& x = strings.back();
      for ( std::size_t t = 0; t < length; ++t )
        inputs( static_cast<Eigen::Index>( t * k + x[t] ), static_cast<Eigen::Index>( idx - lo ) ) = 1.0;
    }
    const Eigen::MatrixXd out = forward_batch( net, inputs );
    for ( std::size_t c = 0; c < strings.size(); ++c )
    {
      const bool expected = accepts( dfa, strings[c] );
      const bool got = out( 0, static_cast<Eigen::Index>( c ) ) > 0.5;
      ++report.total_strings;
      if ( expected != got )
      {
        ++report.mismatch_count;
        if ( report.mismatches.size() < max_witnesses )
          report.mismatches.push_back( { strings[c], expected, got } );
      }
    }
  }
  report.exact = report.mismatch_count == 0;
  return report;
}

inline void merge_reports( VerificationReport& into, VerificationReport part, std::size_t max_witnesses )
{
  into.total_strings += part.total_strings;
  into.mismatch_count += part.mismatch_count;
  for ( auto& m : part.mismatches )
    into.mismatches.push_back( std::move( m ) );
  std::sort( into.mismatches.begin(), into.mismatches.end(),
             []( const Mismatch& a, const Mismatch& b ) { return a.input < b.input; } );
  if ( into.mismatches.size() > max_witnesses )
    into.mismatches.resize( max_witnesses );
  into.exact = into.mismatch_count == 0;
}

} // namespace detail

/// Number of strings in Sigma^T, saturating at UINT64_MAX.
inline std::uint64_t string_count( std::size_t k, std::size_t length )
{
  std::uint64_t total = 1;
  for ( std::size_t t = 0; t < length; ++t )
  {
    if ( total > std::numeric_limits<std::uint64_t>::max() / k )
      return std::numeric_limits<std::uint64_t>::max();
    total *= k;
  }
  return total;
}

/*! \brief Compares the network verdict (output > 0.5) with the DFA on every string of length T.

  Refuses when k^T exceeds `options.budget`. The enumeration may be split
  across `options.jobs` threads; witnesses are merged in lexicographic order
  so the report does not depend on the split.
*/
inline VerificationReport verify_exact( const NetworkSpec& net, const Dfa& dfa, std::size_t length,
                                        const VerifyOptions& options = {} )
{
  detail::check_acceptor_dims( net, dfa, length );
  const auto total = string_count( dfa.alphabet_size(), length );
  if ( total > options.budget )
    throw enumeration_budget_error( std::to_string( dfa.alphabet_size() ) + "^" + std::to_string( length ) +
                                    " strings exceed the enumeration budget of " + std::to_string( options.budget ) );
  const auto jobs = std::max<std::size_t>( 1, std::min<std::uint64_t>( options.jobs, total ) );
  if ( jobs == 1 )
    return detail::verify_range( net, dfa, length, 0, total, options.max_witnesses );

  std::vector<VerificationReport> parts( jobs );
  std::vector<std::thread> workers;
  for ( std::size_t w = 0; w < jobs; ++w )
  {
    const auto begin = total * w / jobs, end = total * ( w + 1 ) / jobs;
    workers.emplace_back( [&, w, begin, end] {
      parts[w] = detail::verify_range( net, dfa, length, begin, end, options.max_witnesses );
    } );
  }
  for ( auto& t : workers )
    t.join();
  VerificationReport report;
  for ( auto& p : parts )
    detail::merge_reports( report, std::move( p ), options.max_witnesses );
  return report;
}

/// Seeded uniform sample of `count` strings of length T (duplicates possible).
inline VerificationReport verify_sampled( const NetworkSpec& net, const Dfa& dfa, std::size_t length,
                                          std::uint64_t count, std::uint64_t seed, std::size_t max_witnesses = 64 )
{
  detail::check_acceptor_dims( net, dfa, length );
  const auto k = dfa.alphabet_size();
  std::mt19937_64 rng( seed );
  std::uniform_int_distribution<symbol_index> pick( 0, k - 1 );
  VerificationReport report;
  for ( std::uint64_t i = 0; i < count; ++i )
  {
    SymbolString x( length );
    for ( auto& s : x )
      s = pick( rng );
    const bool expected = accepts( dfa, x );
    const bool got = forward( net, encode_string( x, k ).data )[0] > 0.5;
    ++report.total_strings;
    if ( expected != got )
    {
      ++report.mismatch_count;
      report.mismatches.push_back( { std::move( x ), expected, got } );
    }
  }
  detail::merge_reports( report, {}, max_witnesses );
  return report;
}

/// Result of checking a single-step construction on all n*k transition inputs.
struct TransitionCheck
{
  std::size_t total_pairs = 0;
  std::size_t wrong_pairs = 0;
  bool exact() const { return wrong_pairs == 0; }
};

/// Checks a transition-layer network: output must equal e_{delta(i, j)} bit for bit.
inline TransitionCheck verify_transition_layer( const NetworkSpec& net, const Dfa& dfa )
{
  const auto n = dfa.state_count(), k = dfa.alphabet_size();
  if ( net.input_dim != n + k || net.output_dim != n )
    throw std::domain_error( "transition network dimensions do not match the automaton" );
  TransitionCheck check;
  for ( state_index i = 0; i < n; ++i )
    for ( symbol_index j = 0; j < k; ++j )
    {
      Eigen::VectorXd in( static_cast<Eigen::Index>( n + k ) );
      in << one_hot( i, n ), one_hot( j, k );
      ++check.total_pairs;
      if ( forward( net, in ) != one_hot( dfa.transition( i, j ), n ) )
        ++check.wrong_pairs;
    }
  return check;
}

/// Checks a binary threshold network: output must equal b_{delta(i, j)} bit for bit.
inline TransitionCheck verify_binary_network( const NetworkSpec& net, const Dfa& dfa )
{
  const auto n = dfa.state_count(), k = dfa.alphabet_size();
  const auto d = binary_width( n );
  if ( net.input_dim != d + k || net.output_dim != d )
    throw std::domain_error( "binary network dimensions do not match the automaton" );
  TransitionCheck check;
  for ( state_index i = 0; i < n; ++i )
    for ( symbol_index j = 0; j < k; ++j )
    {
      Eigen::VectorXd in( static_cast<Eigen::Index>( d + k ) );
      in << binary_code( i, d ), one_hot( j, k );
      ++check.total_pairs;
      if ( forward( net, in ) != binary_code( dfa.transition( i, j ), d ) )
        ++check.wrong_pairs;
    }
  return check;
}

/// Exhaustive check that an embedding network separates exactly the states reached by strings of length T.
struct EmbeddingCheck
{
  std::uint64_t total_strings = 0;
  /// Strings whose embedding differs from the first embedding seen for their state.
  std::uint64_t inconsistent_strings = 0;
  /// Pairs of distinct reached states that share an embedding.
  std::size_t merged_state_pairs = 0;
  std::optional<SymbolString> first_witness;
  bool exact() const { return inconsistent_strings == 0 && merged_state_pairs == 0; }
};

inline EmbeddingCheck verify_embedding( const NetworkSpec& net, const Dfa& dfa, std::size_t length,
                                        std::uint64_t budget = std::uint64_t{ 1 } << 24 )
{
  const auto k = dfa.alphabet_size();
  if ( net.input_dim != length * k )
    throw std::domain_error( "network input dim " + std::to_string( net.input_dim ) + " does not match T*k = " +
                             std::to_string( length * k ) );
  const auto total = string_count( k, length );
  if ( total > budget )
    throw enumeration_budget_error( std::to_string( k ) + "^" + std::to_string( length ) +
                                    " strings exceed the enumeration budget of " + std::to_string( budget ) );
  EmbeddingCheck check;
  std::vector<std::optional<Eigen::VectorXd>> representative( dfa.state_count() );
  for_each_string( k, length, [&]( const SymbolString& x ) {
    ++check.total_strings;
    const auto q = run( dfa, x );
    Eigen::VectorXd e = forward( net, encode_string( x, k ).data );
    if ( !representative[q] )
      representative[q] = std::move( e );
    else if ( *representative[q] != e )
    {
      ++check.inconsistent_strings;
      if ( !check.first_witness )
        check.first_witness = x;
    }
  } );
  for ( std::size_t a = 0; a < representative.size(); ++a )
    for ( std::size_t b = a + 1; b < representative.size(); ++b )
      if ( representative[a] && representative[b] && *representative[a] == *representative[b] )
        ++check.merged_state_pairs;
  return check;
}

} // namespace nfsm
