import click

existing_file = click.Path(exists=True, dir_okay=False, readable=True)

# Flags shared by every command that reads the outage and crew logs
dataset_options = [
    click.option("--outages", type=existing_file, required=True, help="Outage log CSV (id,start,restore,customers)."),
    click.option("--crew", type=existing_file, default=None, help="Hourly crew log CSV (hour_start,fte[,activity])."),
    click.option("--slack-min", type=click.IntRange(min=0), default=None, help="Minutes of gap still merged into one event."),
    click.option("--min-outages", type=click.IntRange(min=1), default=None, help="Drop events with fewer outages."),
    click.option("--exclude-id", "exclude_ids", multiple=True, help="Outage id to leave out; repeatable."),
    click.option("--exclude-activity", "exclude_activities", multiple=True, help="Crew activity to leave out; repeatable."),
    click.option("--customers-served", type=click.IntRange(min=1), default=None, help="Customer base for the SAIDI contribution."),
]

output_options = [
    click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None, help="Directory for report files."),
    click.option("--json", "as_json", is_flag=True, help="Print the JSON report (default)."),
    click.option("--table", "as_table", is_flag=True, help="Print an aligned text table."),
]


def add_options(options):
    """Apply a list of click options to a command."""
    def decorator(command):
        for option in reversed(options):
            command = option(command)
        return command
    return decorator
