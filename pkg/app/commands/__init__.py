from app.commands import analyze, experiment, oracle, select, simulate

# registration order is the order shown in --help
COMMANDS = [simulate, select, analyze, oracle, experiment]
