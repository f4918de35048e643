import typer

from commands import order_check_command, solve_command, table_command
from core.settings import settings
from helpers.logging_helper import logger

app = typer.Typer(
    name="picard-mesh",
    help="Adaptive mesh selection with a local error guarantee for the approximate Picard method.",
    add_completion=False,
    no_args_is_help=True,
)


@app.callback()
def startup() -> None:
    logger.debug(
        f"--- picard-mesh | {'Development' if settings.environment == 'development' else 'Production'} ---"
    )


app.command(name="solve")(solve_command.solve)
app.command(name="table")(table_command.table)
app.command(name="order-check")(order_check_command.order_check)


# To run this application:
# python main.py solve --problem test --delta 0.1 --eps 1e-2 --order 1
if __name__ == "__main__":
    app()
