#include <cstdint>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <nfsm/nfsm.hpp>

namespace
{

using namespace nfsm;

constexpr int exit_ok = 0;
constexpr int exit_mismatch = 1;
constexpr int exit_usage = 2;

/// Thrown for bad input files and flag combinations; maps to exit code 2.
struct usage_error : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

std::string read_file( const std::string& path )
{
  std::ifstream in( path, std::ios::binary );
  if ( !in )
    throw usage_error( "cannot open '" + path + "'" );
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file( const std::string& path, const std::string& text )
{
  std::ofstream out( path, std::ios::binary );
  if ( !out || !( out << text ) )
    throw std::runtime_error( "cannot write '" + path + "'" );
}

io::DfaDocument load_dfa( const std::string& path )
{
  const auto text = read_file( path );
  try
  {
    auto doc = io::parse_dfa( text );
    doc.to_dfa();
    return doc;
  }
  catch ( const io::parse_error& e )
  {
    throw usage_error( path + ":" + e.what() );
  }
  catch ( const std::domain_error& e )
  {
    throw usage_error( path + ": " + e.what() );
  }
}

NetworkSpec load_network( const std::string& path )
{
  try
  {
    return io::parse_network( read_file( path ) );
  }
  catch ( const io::parse_error& e )
  {
    throw usage_error( path + ":" + e.what() );
  }
}

std::string render_string( const SymbolString& x, const io::DfaDocument& doc )
{
  if ( x.empty() )
    return "(empty)";
  std::string out;
  bool single_chars = true;
  for ( const auto& name : doc.symbol_names )
    single_chars = single_chars && name.size() == 1;
  for ( std::size_t i = 0; i < x.size(); ++i )
  {
    if ( i > 0 && !single_chars )
      out += ' ';
    out += doc.symbol_names[x[i]];
  }
  return out;
}

// ---------------------------------------------------------------------------

struct CompileArgs
{
  std::string dfa_path;
  std::string target;
  std::size_t length = 0;
  bool have_length = false;
  std::uint64_t seed = 0;
  double epsilon = 0.1;
  std::string out;
};

int cmd_compile( const CompileArgs& args )
{
  const auto doc = load_dfa( args.dfa_path );
  const auto dfa = doc.to_dfa();
  auto need_length = [&] {
    if ( !args.have_length )
      throw usage_error( "target '" + args.target + "' needs -T/--length" );
    return args.length;
  };
  NetworkSpec net;
  if ( args.target == "unrolled" )
    net = build_unrolled_acceptor( dfa, need_length() );
  else if ( args.target == "transition" )
    net = build_transition_layer( dfa );
  else if ( args.target == "binary" )
    net = build_binary_threshold_network( dfa );
  else if ( args.target == "embedding" )
    net = build_embedding_head( dfa, need_length() );
  else if ( args.target == "compressed" )
  {
    const auto emb = build_compressed_embedding( dfa, args.epsilon, args.seed );
    net = build_compressed_network( dfa, need_length(), emb, args.seed );
    std::cerr << "projection: d=" << emb.projection.rows() << ", min distance " << emb.min_distance << " after "
              << emb.attempts << " draw(s)\n";
  }
  else
    throw usage_error( "unknown target '" + args.target + "'" );

  const auto text = io::write_network( net );
  std::ostream& info = args.out.empty() ? std::cerr : std::cout;
  if ( args.out.empty() )
    std::cout << text;
  else
    write_file( args.out, text );
  info << net.metadata.construction << ": depth " << net.depth() << ", widths [";
  const auto widths = net.widths();
  for ( std::size_t i = 0; i < widths.size(); ++i )
    info << ( i ? ", " : "" ) << widths[i];
  info << "], " << net.parameter_count() << " parameters\n";
  return exit_ok;
}

// ---------------------------------------------------------------------------

struct VerifyArgs
{
  std::string network_path;
  std::string dfa_path;
  std::size_t length = 0;
  bool have_length = false;
  std::uint64_t sampled = 0;
  std::uint64_t seed = 0;
  std::uint64_t budget = std::uint64_t{ 1 } << 24;
  std::size_t jobs = 1;
};

int cmd_verify( const VerifyArgs& args )
{
  const auto net = load_network( args.network_path );
  const auto doc = load_dfa( args.dfa_path );
  const auto dfa = doc.to_dfa();
  const auto& kind = net.metadata.construction;

  try
  {
    if ( kind == construction::transition_layer || kind == construction::binary_threshold )
    {
      const auto check = kind == construction::transition_layer ? verify_transition_layer( net, dfa )
                                                                 : verify_binary_network( net, dfa );
      const auto ok = check.total_pairs - check.wrong_pairs;
      std::cout << ok << "/" << check.total_pairs << ( check.exact() ? " exact" : " transitions correct" ) << '\n';
      return check.exact() ? exit_ok : exit_mismatch;
    }

    std::size_t length = args.length;
    if ( !args.have_length )
    {
      if ( !net.metadata.length )
        throw usage_error( "network carries no length; pass -T/--length" );
      length = *net.metadata.length;
    }

    if ( kind == construction::embedding_head || kind == construction::compressed_embedding )
    {
      if ( args.sampled )
        throw usage_error( "--sampled applies to acceptor networks only" );
      const auto check = verify_embedding( net, dfa, length, args.budget );
      if ( check.exact() )
      {
        std::cout << check.total_strings << "/" << check.total_strings << " exact\n";
        return exit_ok;
      }
      std::cout << "embedding mismatch: " << check.inconsistent_strings << " inconsistent string(s), "
                << check.merged_state_pairs << " merged state pair(s)\n";
      if ( check.first_witness )
        std::cout << "first witness: " << render_string( *check.first_witness, doc ) << '\n';
      return exit_mismatch;
    }

    const auto report = args.sampled
                            ? verify_sampled( net, dfa, length, args.sampled, args.seed )
                            : verify_exact( net, dfa, length, { args.budget, args.jobs, 64 } );
    const auto agree = report.total_strings - report.mismatch_count;
    if ( report.exact )
    {
      std::cout << agree << "/" << report.total_strings << ( args.sampled ? " sampled, no mismatch" : " exact" )
                << '\n';
      return exit_ok;
    }
    std::cout << agree << "/" << report.total_strings << " agree, " << report.mismatch_count << " mismatch(es)\n";
    const auto& w = report.mismatches.front();
    std::cout << "first witness: " << render_string( w.input, doc ) << " (dfa "
              << ( w.dfa_verdict ? "accepts" : "rejects" ) << ", network " << ( w.network_verdict ? "accepts" : "rejects" )
              << ")\n";
    return exit_mismatch;
  }
  catch ( const enumeration_budget_error& e )
  {
    throw usage_error( std::string( e.what() ) + "; use --sampled <count> or raise --budget" );
  }
  catch ( const std::domain_error& e )
  {
    throw usage_error( e.what() );
  }
}

// ---------------------------------------------------------------------------

struct ExperimentArgs
{
  std::string name;
  std::size_t seeds = 5;
  std::uint64_t seed_base = 0;
  std::string out;
  std::size_t jobs = 1;
  bool progress = false;
  std::size_t epochs = 200;
  std::size_t samples = 2000;
  std::string pad = "symbol";
};

std::vector<std::size_t> range( std::size_t lo, std::size_t hi )
{
  std::vector<std::size_t> v( hi - lo + 1 );
  std::iota( v.begin(), v.end(), lo );
  return v;
}

void print_report( const experiments::ExperimentReport& report )
{
  std::cout << "experiment " << report.name << " (" << io::fixed( report.runtime_seconds, 1 ) << " s)\n";
  for ( const auto& [key, value] : report.config_echo )
    std::cout << "  " << key << ": " << value << '\n';
  for ( const auto& metric : report.metrics() )
    std::cout << '\n' << io::render_table( report, metric );
}

int report_bands( const experiments::ExperimentReport& report )
{
  const auto checks = experiments::check_bands( report );
  if ( checks.empty() )
    return exit_ok;
  bool all = true;
  std::cout << "\nreference bands\n";
  for ( const auto& c : checks )
  {
    all = all && c.pass;
    std::cout << "  " << ( c.pass ? "PASS " : "FAIL " ) << c.config << " " << c.metric << " mean " << io::fixed( c.mean )
              << " in [" << io::fixed( c.band.lo ) << ", " << io::fixed( c.band.hi ) << "]\n";
  }
  return all ? exit_ok : exit_mismatch;
}

int cmd_experiment( const ExperimentArgs& args )
{
  std::vector<std::uint64_t> seeds( args.seeds );
  std::iota( seeds.begin(), seeds.end(), args.seed_base );

  experiments::ProtocolOptions options;
  options.jobs = args.jobs;
  options.sample_count = args.samples;
  options.train.epochs = args.epochs;
  std::mutex print_mutex;
  options.log = [&]( const std::string& line ) { std::cerr << line << '\n'; };
  if ( args.progress )
    options.train.progress = [&]( std::size_t epoch, double loss ) {
      std::lock_guard lock( print_mutex );
      std::cerr << "epoch " << epoch + 1 << " loss " << loss << '\n';
    };

  experiments::AnbnOptions anbn;
  if ( args.pad == "zeros" )
    anbn.pad = experiments::PadMode::zeros;
  else if ( args.pad != "symbol" )
    throw usage_error( "--pad must be 'symbol' or 'zeros'" );

  experiments::ExperimentReport report;
  int status = exit_ok;
  if ( args.name == "thm1" )
    report = experiments::run_theorem1( range( 1, 10 ), seeds, options );
  else if ( args.name == "lemma1" )
    report = experiments::run_lemma1( range( 1, 8 ), range( 1, 3 ), seeds, options );
  else if ( args.name == "lemma2" )
    report = experiments::run_lemma2( { 2, 4, 8, 16, 32 }, seeds, options );
  else if ( args.name == "thm2" )
    report = experiments::run_theorem2( range( 1, 10 ), seeds, options );
  else if ( args.name == "cor21" )
    report = experiments::run_corollary21( { 2, 4, 8 }, seeds, options );
  else if ( args.name == "thm3" )
    report = experiments::run_theorem3( seeds, options, anbn );
  else if ( args.name == "cor31" )
  {
    const auto sweep = experiments::constructive_exactness_sweep( { 2, 4, 8, 16, 32 }, 12, args.jobs );
    report = experiments::run_theorem3( seeds, options, anbn );
    report.name = "cor31";
    const auto held = experiments::summarize( report.metric_values( report.configs.front(), "heldout_accuracy" ) );
    const bool regular_ok = sweep.exact();
    const bool nonregular_ok = experiments::thm3_band().contains( held.mean );
    print_report( report );
    std::cout << "\nregular side (thm1 constructive): " << sweep.configurations << " configurations, "
              << sweep.strings_checked << " strings, " << sweep.mismatches << " mismatches -> "
              << ( regular_ok ? "exact" : "NOT exact" ) << '\n';
    std::cout << "non-regular side (thm3): held-out mean " << io::fixed( held.mean ) << " -> "
              << ( nonregular_ok ? "chance level" : "outside the chance band" ) << '\n';
    std::cout << "cor31 " << ( regular_ok && nonregular_ok ? "PASS" : "FAIL" ) << '\n';
    status = regular_ok && nonregular_ok ? exit_ok : exit_mismatch;
  }
  else
    throw usage_error( "unknown experiment '" + args.name + "'" );

  if ( report.name != "cor31" )
  {
    print_report( report );
    status = report_bands( report );
  }
  if ( !args.out.empty() )
    write_file( args.out, io::write_csv( report ) );
  return status;
}

} // namespace

int main( int argc, char** argv )
{
  CLI::App app{ "Compile finite automata into exact neural networks, verify them, and run the training experiments." };
  app.require_subcommand( 1 );

  CompileArgs compile;
  auto* c = app.add_subcommand( "compile", "Compile a DFA file into a network file" );
  c->add_option( "dfa", compile.dfa_path, "DFA document" )->required();
  c->add_option( "-t,--target", compile.target, "unrolled | transition | binary | embedding | compressed" )
      ->required()
      ->check( CLI::IsMember( { "unrolled", "transition", "binary", "embedding", "compressed" } ) );
  auto* c_len = c->add_option( "-T,--length", compile.length, "Input length for whole-string targets" );
  c->add_option( "--seed", compile.seed, "Seed for the compressed projection" );
  c->add_option( "--epsilon", compile.epsilon, "Minimum state separation for the compressed projection" );
  c->add_option( "-o,--out", compile.out, "Network file to write (default: stdout)" );

  VerifyArgs verify;
  auto* v = app.add_subcommand( "verify", "Check a compiled network against a DFA" );
  v->add_option( "network", verify.network_path, "Network document" )->required();
  v->add_option( "dfa", verify.dfa_path, "DFA document" )->required();
  auto* v_len = v->add_option( "-T,--length", verify.length, "String length (default: from the network)" );
  v->add_option( "--sampled", verify.sampled, "Check this many seeded random strings instead of all of them" );
  v->add_option( "--seed", verify.seed, "Seed for --sampled" );
  v->add_option( "--budget", verify.budget, "Largest k^T checked exhaustively" );
  v->add_option( "-j,--jobs", verify.jobs, "Worker threads" )->check( CLI::PositiveNumber );

  ExperimentArgs exp;
  auto* e = app.add_subcommand( "experiment", "Run a training experiment and summarize it over seeds" );
  e->add_option( "name", exp.name, "thm1 | lemma1 | lemma2 | thm2 | cor21 | thm3 | cor31" )->required();
  e->add_option( "--seeds", exp.seeds, "Number of seeds" )->check( CLI::Range( 2, 1000 ) );
  e->add_option( "--seed", exp.seed_base, "First seed" );
  e->add_option( "--out", exp.out, "CSV output (config, seed, metric, value)" );
  e->add_option( "-j,--jobs", exp.jobs, "Seed runs in parallel" )->check( CLI::PositiveNumber );
  e->add_flag( "--progress", exp.progress, "Print per-epoch loss" );
  e->add_option( "--epochs", exp.epochs, "Training epochs" );
  e->add_option( "--samples", exp.samples, "Samples per dataset" );
  e->add_option( "--pad", exp.pad, "Padding for thm3/cor31: symbol | zeros" );

  std::string dot_path;
  auto* d = app.add_subcommand( "export-dot", "Print a DFA file as a Graphviz digraph" );
  d->add_option( "dfa", dot_path, "DFA document" )->required();

  try
  {
    app.parse( argc, argv );
  }
  catch ( const CLI::CallForHelp& err )
  {
    return app.exit( err );
  }
  catch ( const CLI::CallForAllHelp& err )
  {
    return app.exit( err );
  }
  catch ( const CLI::ParseError& err )
  {
    app.exit( err );
    return exit_usage;
  }

  try
  {
    if ( c->parsed() )
    {
      compile.have_length = c_len->count() > 0;
      return cmd_compile( compile );
    }
    if ( v->parsed() )
    {
      verify.have_length = v_len->count() > 0;
      return cmd_verify( verify );
    }
    if ( e->parsed() )
      return cmd_experiment( exp );
    std::cout << io::export_dot( load_dfa( dot_path ) );
    return exit_ok;
  }
  catch ( const usage_error& err )
  {
    std::cerr << "error: " << err.what() << '\n';
    return exit_usage;
  }
  catch ( const std::exception& err )
  {
    std::cerr << "error: " << err.what() << '\n';
    return exit_usage;
  }
}
